#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "gecko/bitmap.hpp"
#include "gecko/reverse_map.hpp"
#include "gecko/scheme.hpp"

namespace gecko {

// Lazy Gecko: a RAM-resident page validity bitmap maintained lazily (bit 1 =
// invalid, false positives allowed until resolved), a flash-resident reverse
// map, and greedy / LRU / window-greedy victim selection. Internal-block
// validity is tracked eagerly since those before-images are always known.
class LazyGecko : public GcScheme {
public:
    LazyGecko(Ftl& ftl, VictimPolicy policy);

    const char* name() const override { return "lazy"; }

    void invalidate(PhysicalAddress pa) override;
    void note_internal_page_stale(PhysicalAddress pa) override;
    void on_data_block_filled(uint32_t block_id, const std::vector<uint64_t>& tags) override;
    void on_block_erased(uint32_t block_id, BlockKind former_kind) override;
    void relocate_internal_pages(uint32_t victim, BlockKind kind) override;
    uint32_t select_victim() override;
    std::vector<LivePage> identify_live_pages(uint32_t victim) override;

    // Presumed live pages: pages-per-block minus the Hamming weight of the
    // block's bitmap slice.
    uint32_t presumed_live(uint32_t block_id) const { return live_counts_[block_id]; }
    bool pvb_bit(PhysicalAddress pa) const;
    const Bitmap& pvb() const { return pvb_; }

private:
    void set_bit(PhysicalAddress pa);
    uint32_t pick_greedy() const;
    uint32_t pick_from_queue();

    Ftl& ftl_;
    VictimPolicy policy_;
    Bitmap pvb_;
    std::vector<uint32_t> live_counts_;
    ReverseMap reverse_;
    // Fill-order queue of data blocks, used by lru / window-greedy.
    std::deque<uint32_t> fill_queue_;
    std::vector<bool> queued_;
};

} // namespace gecko
