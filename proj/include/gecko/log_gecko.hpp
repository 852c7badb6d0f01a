#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "gecko/bitmap.hpp"
#include "gecko/dbq.hpp"
#include "gecko/lsm.hpp"
#include "gecko/reverse_map.hpp"
#include "gecko/scheme.hpp"

namespace gecko {

// Logarithmic Gecko: the validity map lives in flash as an LSM-tree of
// GeckoEntries; data-block victim candidates come from a flash-spillable
// FIFO of rewritten blocks, while internal blocks keep small RAM bitmaps and
// compete greedily. A candidate not picked after three selections is put back
// at the queue tail and the next one is fetched.
class LogGecko : public GcScheme {
public:
    LogGecko(Ftl& ftl, LsmConfig lsm_cfg);

    const char* name() const override { return "logarithmic"; }

    void invalidate(PhysicalAddress pa) override;
    void note_internal_page_stale(PhysicalAddress pa) override;
    void on_data_block_filled(uint32_t block_id, const std::vector<uint64_t>& tags) override;
    void on_block_erased(uint32_t block_id, BlockKind former_kind) override;
    void relocate_internal_pages(uint32_t victim, BlockKind kind) override;
    uint32_t select_victim() override;
    std::vector<LivePage> identify_live_pages(uint32_t victim) override;

    GeckoLsm& lsm() { return lsm_; }
    const GeckoLsm& lsm() const { return lsm_; }
    DataBlockQueue& dbq() { return dbq_; }

    uint32_t internal_presumed_live(uint32_t block_id) const;
    uint32_t lsm_reads_last_identify() const { return lsm_reads_last_identify_; }
    uint64_t candidate_discards() const { return candidate_discards_; }

private:
    struct Candidate {
        uint32_t block_id = 0;
        Bitmap bitmap;
        uint32_t losses = 0;
    };

    bool fetch_candidate(); // pop + query; false when the queue is empty
    bool data_block_eligible(uint32_t block_id) const;

    Ftl& ftl_;
    GeckoLsm lsm_;
    DataBlockQueue dbq_;
    ReverseMap reverse_;
    std::map<uint32_t, Bitmap> internal_bitmaps_;
    std::optional<Candidate> candidate_;
    uint32_t lsm_reads_last_identify_ = 0;
    uint64_t candidate_discards_ = 0;
};

} // namespace gecko
