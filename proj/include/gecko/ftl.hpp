#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gecko/geometry.hpp"
#include "gecko/lsm.hpp"
#include "gecko/mapping.hpp"
#include "gecko/nand.hpp"
#include "gecko/oracle.hpp"
#include "gecko/scheme.hpp"

namespace gecko {

enum class SchemeKind : uint8_t {
    Oracle,      // full mapping and exact validity in RAM, no DFTL
    LazyIdeal,   // DFTL with the whole budget on the cache; validity for free
    Lazy,        // Lazy Gecko
    Logarithmic, // Logarithmic Gecko
};

SchemeKind parse_scheme(const std::string& name);
const char* to_string(SchemeKind kind);

struct FtlConfig {
    DeviceGeometry geometry;
    SchemeKind scheme = SchemeKind::Lazy;
    VictimPolicy policy;
    uint64_t ram_budget_bytes = 1024 * 1024;
    LsmConfig lsm;
    uint32_t gc_threshold = 5; // run GC while the free pool is below max(4, this)
    bool multiway_merge = true;
    bool lazy_hook_enabled = true;
    // Pin the mapping-cache size directly instead of deriving it from the
    // budget (tests and experiments).
    std::size_t cmt_entries_override = 0;

    void validate() const;
};

// Per-GC bookkeeping, for overhead assertions.
struct GcRecord {
    uint32_t victim = 0;
    BlockKind kind = BlockKind::Data;
    uint32_t live_pages = 0;
    uint32_t lsm_reads = 0; // LSM lookups spent identifying this victim
    IoCounters delta;       // all IO issued during this GC operation
};

struct GcEvent {
    uint32_t victim = 0;
    BlockKind kind = BlockKind::Data;
    const std::vector<LivePage>* live = nullptr;
};

// The simulator event loop: one NAND device, one mapping layer (unless the
// scheme keeps the whole map in RAM), one GC scheme, and a shadow oracle
// observing every event for equivalence checks.
class Ftl {
public:
    explicit Ftl(const FtlConfig& cfg);
    ~Ftl();

    void write(uint32_t lba);
    void read(uint32_t lba);

    NandDevice& nand() { return nand_; }
    const NandDevice& nand() const { return nand_; }
    MappingLayer* mapping() { return mapping_.get(); }
    const MappingLayer* mapping() const { return mapping_.get(); }
    GcScheme& scheme() { return *scheme_; }
    const ShadowOracle& oracle() const { return oracle_; }
    const FtlConfig& config() const { return cfg_; }

    uint64_t user_writes() const { return user_writes_; }
    uint64_t gc_operations() const { return gc_records_.size(); }
    const std::vector<GcRecord>& gc_records() const { return gc_records_; }
    uint64_t data_block_fills() const { return data_block_fills_; }
    std::size_t cmt_capacity() const { return cmt_capacity_; }

    // Invoked after live-page identification, before migration.
    std::function<void(const GcEvent&)> gc_observer;

    // --- services for the subsystems ---

    // Program on the active block of a kind, allocating a fresh one when
    // needed. Filling the data frontier triggers the scheme's fill hook.
    PhysicalAddress program_on_frontier(BlockKind kind, uint64_t tag, std::any payload,
                                        IoCategory cat);
    void note_internal_stale(PhysicalAddress pa);
    bool is_gc_candidate(uint32_t block_id) const;
    uint32_t active_block(BlockKind kind) const; // kNoBlock when none
    static constexpr uint32_t kNoBlock = 0xFFFFFFFFu;

    // Erase-recency guard: a lazily recorded before-image address must be
    // ignored once its block has been erased, or the invalidation would land
    // on a recycled page.
    uint64_t erase_seq() const { return erase_seq_; }
    uint64_t last_erase_seq(uint32_t block_id) const { return last_erase_seq_[block_id]; }

    // Run GC until the free pool is back above the trigger threshold.
    void ensure_free_space();
    void run_gc_once();

private:
    void collect_data_block(uint32_t victim, GcRecord& rec);
    void collect_internal_block(uint32_t victim, BlockKind kind);
    void erase_and_notify(uint32_t victim, BlockKind former);
    PhysicalAddress program_user_page(uint32_t lba);
    IoCategory erase_category(BlockKind kind) const;

    FtlConfig cfg_;
    NandDevice nand_;
    ShadowOracle oracle_;
    std::unique_ptr<MappingLayer> mapping_;
    std::unique_ptr<GcScheme> scheme_;
    std::size_t cmt_capacity_ = 0;

    // RAM page mapping for the oracle baseline scheme.
    std::vector<uint32_t> ram_map_;

    std::vector<uint32_t> frontier_; // active block per kind, kNoBlock if none
    std::vector<uint64_t> staged_data_tags_;

    uint64_t erase_seq_ = 0;
    std::vector<uint64_t> last_erase_seq_;

    uint64_t user_writes_ = 0;
    uint64_t data_block_fills_ = 0;
    std::vector<GcRecord> gc_records_;
    bool in_gc_ = false;
};

} // namespace gecko
