#include "gecko/oracle.hpp"

#include <algorithm>
#include <cassert>

namespace gecko {

ShadowOracle::ShadowOracle(const DeviceGeometry& geo)
    : geo_(geo),
      lba_to_page_(geo.logical_pages(), kNone),
      page_to_lba_(geo.physical_pages(), kNone),
      live_counts_(geo.block_count, 0) {}

void ShadowOracle::on_write(uint32_t lba, PhysicalAddress pa) {
    uint32_t old = lba_to_page_[lba];
    if (old != kNone) {
        page_to_lba_[old] = kNone;
        --live_counts_[old / geo_.pages_per_block];
    }
    uint32_t idx = static_cast<uint32_t>(page_index(geo_, pa));
    lba_to_page_[lba] = idx;
    page_to_lba_[idx] = lba;
    ++live_counts_[pa.block_id];
}

void ShadowOracle::on_migrate(uint32_t lba, PhysicalAddress from, PhysicalAddress to) {
    uint32_t from_idx = static_cast<uint32_t>(page_index(geo_, from));
    assert(lba_to_page_[lba] == from_idx);
    page_to_lba_[from_idx] = kNone;
    --live_counts_[from.block_id];
    uint32_t to_idx = static_cast<uint32_t>(page_index(geo_, to));
    lba_to_page_[lba] = to_idx;
    page_to_lba_[to_idx] = lba;
    ++live_counts_[to.block_id];
}

void ShadowOracle::on_erase(uint32_t block_id) {
    // Live pages must have been migrated off before the erase.
    assert(live_counts_[block_id] == 0);
    uint64_t base = static_cast<uint64_t>(block_id) * geo_.pages_per_block;
    for (uint32_t o = 0; o < geo_.pages_per_block; ++o)
        page_to_lba_[base + o] = kNone;
    live_counts_[block_id] = 0;
}

std::optional<PhysicalAddress> ShadowOracle::location(uint32_t lba) const {
    uint32_t idx = lba_to_page_[lba];
    if (idx == kNone) return std::nullopt;
    return address_of(geo_, idx);
}

bool ShadowOracle::is_current(PhysicalAddress pa) const {
    return page_to_lba_[page_index(geo_, pa)] != kNone;
}

std::vector<LivePage> ShadowOracle::live_set(uint32_t block_id) const {
    std::vector<LivePage> out;
    uint64_t base = static_cast<uint64_t>(block_id) * geo_.pages_per_block;
    for (uint32_t o = 0; o < geo_.pages_per_block; ++o) {
        uint32_t lba = page_to_lba_[base + o];
        if (lba != kNone) out.push_back({o, lba});
    }
    return out;
}

std::vector<LivePage> ShadowOracle::live_set_by_map_scan(uint32_t block_id) const {
    std::vector<LivePage> out;
    for (uint32_t lba = 0; lba < lba_to_page_.size(); ++lba) {
        uint32_t idx = lba_to_page_[lba];
        if (idx == kNone) continue;
        if (idx / geo_.pages_per_block == block_id)
            out.push_back({idx % geo_.pages_per_block, lba});
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<LivePage> ShadowOracle::live_set_by_reverse_check(
    uint32_t block_id, std::span<const uint64_t> tags) const {
    std::vector<LivePage> out;
    for (uint32_t o = 0; o < tags.size(); ++o) {
        uint32_t lba = static_cast<uint32_t>(tags[o]);
        uint32_t idx = lba_to_page_[lba];
        uint64_t here = static_cast<uint64_t>(block_id) * geo_.pages_per_block + o;
        if (idx != kNone && idx == here) out.push_back({o, lba});
    }
    return out;
}

} // namespace gecko
