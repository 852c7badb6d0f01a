#pragma once

#include <any>
#include <cstdint>
#include <deque>
#include <vector>

#include "gecko/geometry.hpp"

namespace gecko {

// One stored page: the simulated out-of-band logical tag plus an opaque
// payload. No byte-level content is modelled; amplification depends only on
// IO counts.
struct FlashPage {
    uint64_t tag = 0;
    std::any payload;
};

class FlashBlock {
public:
    explicit FlashBlock(uint32_t pages) : pages_(pages) {}

    uint32_t write_pointer() const { return write_pointer_; }
    uint32_t erase_count() const { return erase_count_; }
    BlockKind kind() const { return kind_; }
    bool full(uint32_t pages_per_block) const { return write_pointer_ == pages_per_block; }

private:
    friend class NandDevice;
    uint32_t write_pointer_ = 0;
    uint32_t erase_count_ = 0;
    BlockKind kind_ = BlockKind::Free;
    bool frontier_ = false; // set while the block is an active write frontier
    std::vector<FlashPage> pages_;
};

// Raw NAND: blocks of sequentially writable pages, erase-before-write,
// block-kind pools and categorized IO counting.
class NandDevice {
public:
    explicit NandDevice(const DeviceGeometry& geo);

    const DeviceGeometry& geometry() const { return geo_; }

    // Removes a block from the free pool and assigns it a kind. The block is a
    // write frontier until it fills. Throws OutOfFreeBlocks when the pool is
    // empty (the caller must garbage-collect first).
    uint32_t allocate_block(BlockKind kind);

    void program_page(PhysicalAddress pa, uint64_t tag, std::any payload, IoCategory cat);
    const FlashPage& read_page(PhysicalAddress pa, IoCategory cat);
    void erase_block(uint32_t block_id, IoCategory cat);

    const FlashBlock& block(uint32_t id) const { return blocks_.at(id); }
    std::size_t free_block_count() const { return free_pool_.size(); }
    bool is_frontier(uint32_t id) const { return blocks_.at(id).frontier_; }
    bool is_full(uint32_t id) const {
        return blocks_.at(id).write_pointer_ == geo_.pages_per_block;
    }

    const IoCounters& counters() const { return counters_; }
    uint64_t total_programs() const { return total_programs_; }
    uint64_t total_erases() const { return total_erases_; }

    // Uncounted inspection, for oracles and tests only; never part of a
    // simulated IO path.
    const FlashPage& peek_page(PhysicalAddress pa) const;
    bool is_programmed(PhysicalAddress pa) const {
        const FlashBlock& b = blocks_.at(pa.block_id);
        return b.kind_ != BlockKind::Free && pa.page_offset < b.write_pointer_;
    }

private:
    FlashBlock& block_mut(uint32_t id) { return blocks_.at(id); }

    DeviceGeometry geo_;
    std::vector<FlashBlock> blocks_;
    std::deque<uint32_t> free_pool_;
    IoCounters counters_;
    uint64_t total_programs_ = 0;
    uint64_t total_erases_ = 0;
};

} // namespace gecko
