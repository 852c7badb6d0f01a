#include "gecko/lazy_gecko.hpp"

#include <cassert>
#include <limits>

#include "gecko/errors.hpp"
#include "gecko/ftl.hpp"

namespace gecko {

LazyGecko::LazyGecko(Ftl& ftl, VictimPolicy policy)
    : ftl_(ftl),
      policy_(policy),
      pvb_(ftl.nand().geometry().physical_pages()),
      live_counts_(ftl.nand().geometry().block_count,
                   ftl.nand().geometry().pages_per_block),
      reverse_(ftl),
      queued_(ftl.nand().geometry().block_count, false) {}

bool LazyGecko::pvb_bit(PhysicalAddress pa) const {
    return pvb_.test(page_index(ftl_.nand().geometry(), pa));
}

void LazyGecko::set_bit(PhysicalAddress pa) {
    if (pvb_.set(page_index(ftl_.nand().geometry(), pa)))
        --live_counts_[pa.block_id];
}

void LazyGecko::invalidate(PhysicalAddress pa) { set_bit(pa); }

void LazyGecko::note_internal_page_stale(PhysicalAddress pa) { set_bit(pa); }

void LazyGecko::on_data_block_filled(uint32_t block_id, const std::vector<uint64_t>& tags) {
    reverse_.write_for_block(block_id, tags);
    if (!queued_[block_id]) {
        fill_queue_.push_back(block_id);
        queued_[block_id] = true;
    }
}

void LazyGecko::on_block_erased(uint32_t block_id, BlockKind former_kind) {
    if (former_kind == BlockKind::Data)
        reverse_.drop_block(block_id); // describes contents that are now gone
    const DeviceGeometry& geo = ftl_.nand().geometry();
    uint64_t base = static_cast<uint64_t>(block_id) * geo.pages_per_block;
    for (uint32_t o = 0; o < geo.pages_per_block; ++o) pvb_.reset(base + o);
    live_counts_[block_id] = geo.pages_per_block;
    queued_[block_id] = false;
}

void LazyGecko::relocate_internal_pages(uint32_t victim, BlockKind kind) {
    if (kind != BlockKind::Reverse) return;
    for (uint32_t covered : reverse_.covered_blocks_on(victim))
        reverse_.migrate_page(covered);
}

uint32_t LazyGecko::pick_greedy() const {
    const DeviceGeometry& geo = ftl_.nand().geometry();
    uint32_t best = Ftl::kNoBlock;
    uint32_t best_live = geo.pages_per_block; // a fully live block is not worth collecting
    for (uint32_t b = 0; b < geo.block_count; ++b) {
        if (!ftl_.is_gc_candidate(b)) continue;
        if (live_counts_[b] < best_live) {
            best = b;
            best_live = live_counts_[b];
        }
    }
    return best;
}

uint32_t LazyGecko::pick_from_queue() {
    // Drop stale heads (erased blocks get unflagged).
    auto eligible = [&](uint32_t b) { return queued_[b] && ftl_.is_gc_candidate(b); };
    while (!fill_queue_.empty() && !eligible(fill_queue_.front())) {
        if (!queued_[fill_queue_.front()]) fill_queue_.pop_front();
        else break; // queued but not yet collectible (still the frontier)
    }
    if (fill_queue_.empty()) return Ftl::kNoBlock;

    if (policy_.kind == VictimPolicyKind::Lru) {
        uint32_t b = fill_queue_.front();
        if (!eligible(b)) return Ftl::kNoBlock;
        fill_queue_.pop_front();
        queued_[b] = false;
        return b;
    }
    // Window-greedy: best presumed-live count among the front X entries.
    uint32_t best = Ftl::kNoBlock;
    uint32_t best_live = std::numeric_limits<uint32_t>::max();
    std::size_t seen = 0;
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i < fill_queue_.size() && seen < policy_.window; ++i) {
        uint32_t b = fill_queue_[i];
        if (!eligible(b)) continue;
        ++seen;
        if (live_counts_[b] < best_live) {
            best = b;
            best_live = live_counts_[b];
            best_pos = i;
        }
    }
    if (best == Ftl::kNoBlock) return best;
    fill_queue_.erase(fill_queue_.begin() + static_cast<std::ptrdiff_t>(best_pos));
    queued_[best] = false;
    return best;
}

uint32_t LazyGecko::select_victim() {
    uint32_t pick = Ftl::kNoBlock;
    if (policy_.kind == VictimPolicyKind::Greedy) {
        pick = pick_greedy();
    } else {
        pick = pick_from_queue();
        // Internal blocks never enter the fill queue; let them compete on
        // their exact counts so translation/reverse space is reclaimable.
        uint32_t internal_best = Ftl::kNoBlock;
        uint32_t internal_live = ftl_.nand().geometry().pages_per_block;
        for (uint32_t b = 0; b < ftl_.nand().geometry().block_count; ++b) {
            if (!ftl_.is_gc_candidate(b)) continue;
            if (ftl_.nand().block(b).kind() == BlockKind::Data) continue;
            if (live_counts_[b] < internal_live) {
                internal_best = b;
                internal_live = live_counts_[b];
            }
        }
        if (internal_best != Ftl::kNoBlock &&
            (pick == Ftl::kNoBlock || internal_live < live_counts_[pick])) {
            if (pick != Ftl::kNoBlock) {
                // Put the data pick back where it came from (front).
                fill_queue_.push_front(pick);
                queued_[pick] = true;
            }
            pick = internal_best;
        }
    }
    if (pick == Ftl::kNoBlock)
        throw NoVictim("no reclaimable block");
    return pick;
}

std::vector<LivePage> LazyGecko::identify_live_pages(uint32_t victim) {
    const DeviceGeometry& geo = ftl_.nand().geometry();
    std::vector<uint32_t> tags = reverse_.read_for_block(victim); // 1 reverse read
    assert(tags.size() == geo.pages_per_block);
    const MappingLayer* mapping = ftl_.mapping();
    std::vector<LivePage> live;
    for (uint32_t o = 0; o < tags.size(); ++o) {
        uint32_t lba = tags[o];
        PhysicalAddress here{victim, o};
        const CmtEntry* cached = mapping ? mapping->probe(lba) : nullptr;
        if (cached) {
            // The cache is authoritative for its residents: the page is live
            // iff it is the entry's current address. An unsynchronized
            // mismatch is a false positive we can resolve on the spot.
            uint32_t packed = static_cast<uint32_t>(page_index(geo, here));
            if (cached->ppa == packed) {
                live.push_back({o, lba});
            } else if (!cached->synch) {
                invalidate(here);
            }
            continue;
        }
        if (!pvb_bit(here)) live.push_back({o, lba});
    }
    return live;
}

} // namespace gecko
