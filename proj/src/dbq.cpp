#include "gecko/dbq.hpp"

#include <cassert>

#include "gecko/errors.hpp"
#include "gecko/ftl.hpp"

namespace gecko {

DataBlockQueue::DataBlockQueue(Ftl& ftl)
    : ftl_(ftl),
      ids_per_page_(ftl.nand().geometry().page_bytes /
                    ftl.nand().geometry().address_bytes) {}

void DataBlockQueue::push(uint32_t block_id) {
    input_.push_back(block_id);
    if (input_.size() == ids_per_page_) {
        QueuePagePayload payload;
        payload.seq = next_seq_++;
        payload.block_ids.assign(input_.begin(), input_.end());
        input_.clear();
        PhysicalAddress pa = ftl_.program_on_frontier(BlockKind::Queue, payload.seq,
                                                      std::move(payload), IoCategory::Queue);
        directory_.push_back(pa);
    }
}

void DataBlockQueue::refill_output() {
    if (!directory_.empty()) {
        PhysicalAddress pa = directory_.front();
        directory_.pop_front();
        const FlashPage& page = ftl_.nand().read_page(pa, IoCategory::Queue);
        const auto& payload = std::any_cast<const QueuePagePayload&>(page.payload);
        output_.assign(payload.block_ids.begin(), payload.block_ids.end());
        ftl_.note_internal_stale(pa); // consumed spill page
        return;
    }
    // Nothing spilled: drain the input side directly, no IO.
    output_.swap(input_);
}

uint32_t DataBlockQueue::pop() {
    if (output_.empty()) {
        if (directory_.empty() && input_.empty())
            throw EmptyQueue("data block queue is empty");
        refill_output();
    }
    assert(!output_.empty());
    uint32_t id = output_.front();
    output_.pop_front();
    return id;
}

bool DataBlockQueue::empty() const {
    return output_.empty() && input_.empty() && directory_.empty();
}

std::size_t DataBlockQueue::size() const {
    return output_.size() + input_.size() + directory_.size() * ids_per_page_;
}

std::vector<std::size_t> DataBlockQueue::pages_on_block(uint32_t block_id) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < directory_.size(); ++i)
        if (directory_[i].block_id == block_id) out.push_back(i);
    return out;
}

void DataBlockQueue::migrate_page(std::size_t directory_index) {
    PhysicalAddress old = directory_[directory_index];
    const FlashPage& page = ftl_.nand().read_page(old, IoCategory::GcMigration);
    QueuePagePayload payload = std::any_cast<const QueuePagePayload&>(page.payload);
    uint64_t seq = payload.seq;
    PhysicalAddress npa = ftl_.program_on_frontier(BlockKind::Queue, seq,
                                                   std::move(payload), IoCategory::GcMigration);
    ftl_.note_internal_stale(old);
    directory_[directory_index] = npa;
}

} // namespace gecko
