#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "gecko/geometry.hpp"

namespace gecko {

class Ftl;

// Flash image of one spilled queue page.
struct QueuePagePayload {
    uint64_t seq = 0;
    std::vector<uint32_t> block_ids;
};

// Data Block Queue: FIFO of rewritten data blocks with a RAM input buffer on
// the push side, a RAM output buffer on the pop side, and full pages spilled
// to Queue blocks in between, tracked by the Queue Directory. Spilling costs
// one queue write and one queue read per page-bytes/address-bytes entries.
class DataBlockQueue {
public:
    explicit DataBlockQueue(Ftl& ftl);

    void push(uint32_t block_id);
    uint32_t pop(); // throws EmptyQueue
    bool empty() const;
    std::size_t size() const;

    std::size_t spilled_pages() const { return directory_.size(); }

    // GC support for Queue blocks.
    std::vector<std::size_t> pages_on_block(uint32_t block_id) const;
    void migrate_page(std::size_t directory_index);

private:
    void refill_output();

    Ftl& ftl_;
    std::size_t ids_per_page_;
    std::deque<uint32_t> input_;  // newest side
    std::deque<uint32_t> output_; // oldest side
    std::deque<PhysicalAddress> directory_; // oldest page first
    uint64_t next_seq_ = 1;
};

} // namespace gecko
