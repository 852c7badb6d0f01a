#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gecko/geometry.hpp"

namespace gecko {

class Ftl;

// Flash image of one reverse-map page: the logical address last written at
// each offset of one data block.
struct ReversePagePayload {
    uint32_t covered_block = 0;
    std::vector<uint32_t> lbas;
};

// Flash-resident reverse map, one page per data block, living on Reverse
// blocks. A RAM directory (RMD) locates each block's page. The page for a
// block is regenerated from the block's staged tags whenever the block fills,
// costing one reverse write; reading it back at GC costs one reverse read.
class ReverseMap {
public:
    explicit ReverseMap(Ftl& ftl);

    void write_for_block(uint32_t data_block, const std::vector<uint64_t>& tags);
    std::vector<uint32_t> read_for_block(uint32_t data_block); // 1 reverse read

    // Drop the page for an erased data block (its contents are gone).
    void drop_block(uint32_t data_block);

    // GC support for Reverse blocks.
    std::vector<uint32_t> covered_blocks_on(uint32_t reverse_block) const;
    void migrate_page(uint32_t covered_block);

    bool has_page(uint32_t data_block) const { return rmd_[data_block].has_value(); }

private:
    Ftl& ftl_;
    std::vector<std::optional<PhysicalAddress>> rmd_;
};

} // namespace gecko
