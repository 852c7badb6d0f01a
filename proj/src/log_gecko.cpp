#include "gecko/log_gecko.hpp"

#include <cassert>

#include "gecko/errors.hpp"
#include "gecko/ftl.hpp"
#include "gecko/mapping.hpp"

namespace gecko {

LogGecko::LogGecko(Ftl& ftl, LsmConfig lsm_cfg)
    : ftl_(ftl), lsm_(ftl, lsm_cfg), dbq_(ftl), reverse_(ftl) {}

void LogGecko::invalidate(PhysicalAddress pa) {
    assert(ftl_.nand().block(pa.block_id).kind() == BlockKind::Data);
    lsm_.note_invalidate(pa);
}

void LogGecko::note_internal_page_stale(PhysicalAddress pa) {
    auto [it, inserted] = internal_bitmaps_.try_emplace(
        pa.block_id, Bitmap(ftl_.nand().geometry().pages_per_block));
    it->second.set(pa.page_offset);
}

uint32_t LogGecko::internal_presumed_live(uint32_t block_id) const {
    uint32_t pages = ftl_.nand().geometry().pages_per_block;
    auto it = internal_bitmaps_.find(block_id);
    if (it == internal_bitmaps_.end()) return pages;
    return pages - static_cast<uint32_t>(it->second.popcount());
}

void LogGecko::on_data_block_filled(uint32_t block_id, const std::vector<uint64_t>& tags) {
    reverse_.write_for_block(block_id, tags);
    dbq_.push(block_id);
}

void LogGecko::on_block_erased(uint32_t block_id, BlockKind former_kind) {
    if (former_kind == BlockKind::Data) {
        reverse_.drop_block(block_id); // describes contents that are now gone
        lsm_.note_block_rewritten(block_id);
    } else {
        internal_bitmaps_.erase(block_id);
    }
    if (candidate_ && candidate_->block_id == block_id) candidate_.reset();
}

void LogGecko::relocate_internal_pages(uint32_t victim, BlockKind kind) {
    switch (kind) {
    case BlockKind::Reverse:
        for (uint32_t covered : reverse_.covered_blocks_on(victim))
            reverse_.migrate_page(covered);
        break;
    case BlockKind::Gecko:
        for (auto [run, page] : lsm_.pages_on_block(victim))
            lsm_.migrate_page(run, page);
        break;
    case BlockKind::Queue:
        for (std::size_t idx : dbq_.pages_on_block(victim))
            dbq_.migrate_page(idx);
        break;
    default:
        break;
    }
}

bool LogGecko::data_block_eligible(uint32_t block_id) const {
    return ftl_.is_gc_candidate(block_id) &&
           ftl_.nand().block(block_id).kind() == BlockKind::Data;
}

bool LogGecko::fetch_candidate() {
    while (!dbq_.empty()) {
        uint32_t id = dbq_.pop();
        if (!data_block_eligible(id)) continue;
        Candidate c;
        c.block_id = id;
        c.bitmap = lsm_.query(id); // cached in RAM while it competes
        c.losses = 0;
        candidate_ = std::move(c);
        return true;
    }
    candidate_.reset();
    return false;
}

uint32_t LogGecko::select_victim() {
    if (!candidate_) fetch_candidate();

    const uint32_t pages = ftl_.nand().geometry().pages_per_block;
    uint32_t best_internal = Ftl::kNoBlock;
    uint32_t best_internal_live = pages;
    for (const auto& [block_id, bitmap] : internal_bitmaps_) {
        if (!ftl_.is_gc_candidate(block_id)) continue;
        if (ftl_.nand().block(block_id).kind() == BlockKind::Data) continue;
        uint32_t live = pages - static_cast<uint32_t>(bitmap.popcount());
        if (live < best_internal_live) {
            best_internal = block_id;
            best_internal_live = live;
        }
    }

    auto candidate_live = [&]() {
        return pages - static_cast<uint32_t>(candidate_->bitmap.popcount());
    };

    if (best_internal == Ftl::kNoBlock) {
        // Collecting a fully live block reclaims nothing; rotate past such
        // candidates rather than spinning.
        std::size_t budget = dbq_.size() + 1;
        while (candidate_ && candidate_live() == pages && budget-- > 0) {
            dbq_.push(candidate_->block_id);
            ++candidate_discards_;
            candidate_.reset();
            fetch_candidate();
        }
        if (!candidate_ || candidate_live() == pages)
            throw NoVictim("no reclaimable block");
    }

    // Greedy over {internal blocks} + {cached candidate}; the candidate wins
    // ties since it is the least recently rewritten.
    if (candidate_ && (best_internal == Ftl::kNoBlock || candidate_live() <= best_internal_live)) {
        uint32_t victim = candidate_->block_id;
        candidate_.reset();
        fetch_candidate(); // start evaluating the next one right away
        return victim;
    }
    if (candidate_) {
        if (++candidate_->losses >= 3) {
            // Cold candidate: back to the tail, fetch the next.
            dbq_.push(candidate_->block_id);
            ++candidate_discards_;
            candidate_.reset();
            fetch_candidate();
        }
    }
    return best_internal;
}

std::vector<LivePage> LogGecko::identify_live_pages(uint32_t victim) {
    const DeviceGeometry& geo = ftl_.nand().geometry();
    uint32_t lsm_reads = 0;
    Bitmap bitmap = lsm_.query(victim, &lsm_reads);
    lsm_reads_last_identify_ = lsm_reads;

    std::vector<uint32_t> tags = reverse_.read_for_block(victim); // 1 reverse read
    assert(tags.size() == geo.pages_per_block);
    const MappingLayer* mapping = ftl_.mapping();
    std::vector<LivePage> live;
    for (uint32_t o = 0; o < tags.size(); ++o) {
        uint32_t lba = tags[o];
        PhysicalAddress here{victim, o};
        const CmtEntry* cached = mapping ? mapping->probe(lba) : nullptr;
        if (cached) {
            uint32_t packed = static_cast<uint32_t>(page_index(geo, here));
            if (cached->ppa == packed) {
                live.push_back({o, lba});
            } else if (!cached->synch) {
                invalidate(here);
                bitmap.set(o);
            }
            continue;
        }
        if (!bitmap.test(o)) live.push_back({o, lba});
    }
    return live;
}

} // namespace gecko
