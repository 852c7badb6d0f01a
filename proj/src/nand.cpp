#include "gecko/nand.hpp"

#include "gecko/errors.hpp"

namespace gecko {

NandDevice::NandDevice(const DeviceGeometry& geo) : geo_(geo) {
    geo_.validate();
    blocks_.reserve(geo_.block_count);
    for (uint32_t i = 0; i < geo_.block_count; ++i) {
        blocks_.emplace_back(geo_.pages_per_block);
        free_pool_.push_back(i);
    }
}

uint32_t NandDevice::allocate_block(BlockKind kind) {
    if (free_pool_.empty())
        throw OutOfFreeBlocks("free pool exhausted");
    uint32_t id = free_pool_.front();
    free_pool_.pop_front();
    FlashBlock& b = blocks_[id];
    b.kind_ = kind;
    b.frontier_ = true;
    return id;
}

void NandDevice::program_page(PhysicalAddress pa, uint64_t tag, std::any payload,
                              IoCategory cat) {
    FlashBlock& b = block_mut(pa.block_id);
    if (b.kind_ == BlockKind::Free)
        throw WriteToFreeBlock("program on unallocated block " + std::to_string(pa.block_id));
    if (pa.page_offset != b.write_pointer_)
        throw NonSequentialWrite("offset " + std::to_string(pa.page_offset) +
                                 " but write pointer is " + std::to_string(b.write_pointer_));
    FlashPage& page = b.pages_[pa.page_offset];
    page.tag = tag;
    page.payload = std::move(payload);
    ++b.write_pointer_;
    if (b.write_pointer_ == geo_.pages_per_block)
        b.frontier_ = false;
    counters_.add(IoOp::Write, cat);
    ++total_programs_;
}

const FlashPage& NandDevice::read_page(PhysicalAddress pa, IoCategory cat) {
    const FlashBlock& b = block(pa.block_id);
    if (pa.page_offset >= b.write_pointer_)
        throw ReadUnwritten("offset " + std::to_string(pa.page_offset) +
                            " beyond write pointer " + std::to_string(b.write_pointer_));
    counters_.add(IoOp::Read, cat);
    return b.pages_[pa.page_offset];
}

void NandDevice::erase_block(uint32_t block_id, IoCategory cat) {
    FlashBlock& b = block_mut(block_id);
    if (b.frontier_)
        throw EraseActiveBlock("block " + std::to_string(block_id) +
                               " is an active write frontier");
    if (b.kind_ == BlockKind::Free)
        throw SimError("erase of free block " + std::to_string(block_id));
    b.write_pointer_ = 0;
    ++b.erase_count_;
    b.kind_ = BlockKind::Free;
    for (auto& p : b.pages_) p = FlashPage{};
    free_pool_.push_back(block_id);
    counters_.add(IoOp::Erase, cat);
    ++total_erases_;
}

const FlashPage& NandDevice::peek_page(PhysicalAddress pa) const {
    return blocks_.at(pa.block_id).pages_.at(pa.page_offset);
}

} // namespace gecko
