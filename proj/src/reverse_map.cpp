#include "gecko/reverse_map.hpp"

#include <cassert>

#include "gecko/errors.hpp"
#include "gecko/ftl.hpp"

namespace gecko {

ReverseMap::ReverseMap(Ftl& ftl)
    : ftl_(ftl), rmd_(ftl.nand().geometry().block_count) {}

void ReverseMap::write_for_block(uint32_t data_block, const std::vector<uint64_t>& tags) {
    ReversePagePayload payload;
    payload.covered_block = data_block;
    payload.lbas.reserve(tags.size());
    for (uint64_t t : tags) payload.lbas.push_back(static_cast<uint32_t>(t));
    std::optional<PhysicalAddress> old = rmd_[data_block];
    PhysicalAddress npa = ftl_.program_on_frontier(BlockKind::Reverse, data_block,
                                                   std::move(payload), IoCategory::Reverse);
    if (old) ftl_.note_internal_stale(*old);
    rmd_[data_block] = npa;
}

std::vector<uint32_t> ReverseMap::read_for_block(uint32_t data_block) {
    if (!rmd_[data_block])
        throw SimError("no reverse page for block " + std::to_string(data_block));
    const FlashPage& page = ftl_.nand().read_page(*rmd_[data_block], IoCategory::Reverse);
    const auto& payload = std::any_cast<const ReversePagePayload&>(page.payload);
    assert(payload.covered_block == data_block);
    return payload.lbas;
}

void ReverseMap::drop_block(uint32_t data_block) {
    if (!rmd_[data_block]) return;
    ftl_.note_internal_stale(*rmd_[data_block]);
    rmd_[data_block].reset();
}

std::vector<uint32_t> ReverseMap::covered_blocks_on(uint32_t reverse_block) const {
    std::vector<uint32_t> out;
    for (uint32_t b = 0; b < rmd_.size(); ++b)
        if (rmd_[b] && rmd_[b]->block_id == reverse_block) out.push_back(b);
    return out;
}

void ReverseMap::migrate_page(uint32_t covered_block) {
    assert(rmd_[covered_block]);
    PhysicalAddress old = *rmd_[covered_block];
    const FlashPage& page = ftl_.nand().read_page(old, IoCategory::GcMigration);
    ReversePagePayload payload = std::any_cast<const ReversePagePayload&>(page.payload);
    PhysicalAddress npa = ftl_.program_on_frontier(BlockKind::Reverse, covered_block,
                                                   std::move(payload), IoCategory::GcMigration);
    ftl_.note_internal_stale(old);
    rmd_[covered_block] = npa;
}

} // namespace gecko
