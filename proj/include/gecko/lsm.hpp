#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "gecko/bitmap.hpp"
#include "gecko/geometry.hpp"

namespace gecko {

class Ftl;

// One LSM record: a block's invalidity bitmap plus the erase flag that marks
// "everything older than this is obsolete".
struct GeckoEntry {
    uint32_t block_id = 0;
    Bitmap bitmap;
    bool erase_flag = false;

    GeckoEntry() = default;
    GeckoEntry(uint32_t id, uint32_t pages_per_block)
        : block_id(id), bitmap(pages_per_block) {}
};

// Merge rule for two entries with the same key. `newer` comes from the more
// recently created run; its erase flag cuts off everything older.
GeckoEntry merge_entries(const GeckoEntry& newer, const GeckoEntry& older);

struct LsmConfig {
    uint32_t size_ratio = 4;         // T: size ratio between adjacent levels
    uint32_t compression_levels = 2; // lowest levels stored offset-compressed
    uint32_t compress_max_bits = 2;  // entries with at most this many set bits compress

    void validate() const;
};

// Byte sizes used for page-capacity accounting. Raw: key + bitmap + flag.
// Compressed: key + one address-sized word holding up to two 16-bit page
// offsets (one slot doubles as the erase-flag marker).
uint32_t raw_entry_bytes(const DeviceGeometry& geo);
uint32_t compressed_entry_bytes(const DeviceGeometry& geo);
bool entry_compressible(const GeckoEntry& e, const LsmConfig& cfg);
uint32_t encoded_entry_bytes(const GeckoEntry& e, const DeviceGeometry& geo,
                             const LsmConfig& cfg, bool compressed_run);

// Lossless offset-list round trip for compressible entries.
std::vector<uint16_t> compress_entry(const GeckoEntry& e);
GeckoEntry decompress_entry(uint32_t block_id, const std::vector<uint16_t>& words,
                            uint32_t pages_per_block);

// Flash image of one LSM page: a sorted slice of one run.
struct GeckoPagePayload {
    uint64_t run_seq = 0;
    bool compressed = false;
    std::vector<GeckoEntry> entries;
};

// One sorted run plus its directory entry: flash locations and per-page first
// keys (the LGMD rows for this run).
struct SortedRun {
    uint64_t seq = 0;   // creation order; larger = newer
    uint32_t level = 1;
    bool compressed = false;
    std::vector<PhysicalAddress> pages;
    std::vector<uint32_t> first_keys;

    uint32_t page_count() const { return static_cast<uint32_t>(pages.size()); }
};

// The page validity map restructured as a flash-resident LSM-tree: a RAM
// buffer one flash page in size, leveled sorted runs on Gecko blocks, a RAM
// directory of page locations and first keys, point queries and multi-way
// merging.
class GeckoLsm {
public:
    GeckoLsm(Ftl& ftl, LsmConfig cfg);

    // Overloaded invalidate: sets one bit in the buffered entry for the
    // block, flushing when the buffer fills.
    void note_invalidate(PhysicalAddress pa);

    // A data block was reclaimed: its entry becomes a blank bitmap with the
    // erase flag set, superseding anything buffered for it.
    void note_block_rewritten(uint32_t block_id);

    // Invalidity bitmap for one block, newest-first with erase cut-off.
    // Costs at most one LSM read per run consulted.
    Bitmap query(uint32_t block_id, uint32_t* reads_out = nullptr);

    void flush_buffer(); // force-flush (normally triggered by capacity)

    std::size_t run_count() const { return runs_.size(); }
    const std::vector<SortedRun>& runs() const { return runs_; }
    std::size_t buffer_entries() const { return buffer_.size(); }
    std::size_t buffer_bytes() const { return buffer_bytes_; }
    uint64_t flush_count() const { return flushes_; }
    uint64_t merge_count() const { return merges_; }
    uint64_t invalidate_events() const { return invalidate_events_; }

    // Use pairwise per-level merging instead of the multi-way policy.
    void set_cascade_mode(bool on) { cascade_mode_ = on; }

    // GC support for Gecko blocks.
    std::vector<std::pair<std::size_t, std::size_t>> pages_on_block(uint32_t block_id) const;
    void migrate_page(std::size_t run_index, std::size_t page_index);

    // Uncounted replay of the whole tree for invariant checks and tests.
    Bitmap materialize_block_uncounted(uint32_t block_id) const;

    static uint32_t max_levels(const DeviceGeometry& geo, const LsmConfig& cfg);

private:
    uint32_t level_of_size(uint32_t pages) const;
    uint32_t buffer_entry_bytes(const GeckoEntry& e) const;
    void insert_or_update(uint32_t block_id, uint32_t set_offset, bool rewrite);
    void maybe_merge();
    void merge_once(std::vector<std::size_t> participant_indexes);
    std::vector<GeckoEntry> read_run_page(const SortedRun& run, std::size_t page,
                                          IoCategory cat);
    void emit_run(std::vector<GeckoEntry> entries, bool compressed);
    void discard_run(const SortedRun& run);

    Ftl& ftl_;
    LsmConfig cfg_;
    uint32_t pages_per_block_;
    uint32_t page_bytes_;
    std::map<uint32_t, GeckoEntry> buffer_; // level 0, sorted by block id
    std::size_t buffer_bytes_ = 0;
    bool buffer_compressed_accounting_;
    std::vector<SortedRun> runs_; // unordered; recency via seq
    uint64_t next_seq_ = 1;
    uint64_t flushes_ = 0;
    uint64_t merges_ = 0;
    uint64_t invalidate_events_ = 0;
    bool cascade_mode_ = false;
};

} // namespace gecko
