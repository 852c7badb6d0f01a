#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "gecko/errors.hpp"

namespace gecko {

// Device dimensions. Logical capacity is derived from physical capacity and
// the over-provisioning fraction.
struct DeviceGeometry {
    uint32_t block_count = 0;       // blocks in the device
    uint32_t pages_per_block = 0;   // pages per erase block
    uint32_t page_bytes = 0;        // page size in bytes
    double over_provisioning = 0.0; // fraction of physical space hidden from the host
    uint32_t address_bytes = 4;     // bytes per page/block address

    uint64_t physical_pages() const {
        return static_cast<uint64_t>(block_count) * pages_per_block;
    }
    uint64_t logical_pages() const {
        return static_cast<uint64_t>(static_cast<double>(physical_pages()) *
                                     (1.0 - over_provisioning));
    }
    // Mapping entries that fit into one flash page.
    uint32_t entries_per_translation_page() const { return page_bytes / address_bytes; }
    uint32_t translation_page_count() const {
        uint64_t lba = logical_pages();
        uint32_t epp = entries_per_translation_page();
        return static_cast<uint32_t>((lba + epp - 1) / epp);
    }

    void validate() const;
};

struct PhysicalAddress {
    uint32_t block_id = 0;
    uint32_t page_offset = 0;

    bool operator==(const PhysicalAddress&) const = default;
};

// Dense page index used inside payloads and bitmaps.
inline uint64_t page_index(const DeviceGeometry& geo, PhysicalAddress pa) {
    return static_cast<uint64_t>(pa.block_id) * geo.pages_per_block + pa.page_offset;
}
inline PhysicalAddress address_of(const DeviceGeometry& geo, uint64_t index) {
    return PhysicalAddress{static_cast<uint32_t>(index / geo.pages_per_block),
                           static_cast<uint32_t>(index % geo.pages_per_block)};
}

enum class BlockKind : uint8_t { Free = 0, Data, Translation, Reverse, Gecko, Queue };

const char* to_string(BlockKind kind);

enum class IoOp : uint8_t { Read = 0, Write = 1, Erase = 2 };

enum class IoCategory : uint8_t {
    User = 0,
    Translation,
    Reverse,
    GcMigration,
    Lsm,
    Queue,
};
inline constexpr std::size_t kIoCategoryCount = 6;

const char* to_string(IoCategory cat);

// Flash read/write/erase tallies, split by operation and category.
class IoCounters {
public:
    void add(IoOp op, IoCategory cat, uint64_t n = 1) {
        counts_[static_cast<std::size_t>(op)][static_cast<std::size_t>(cat)] += n;
    }
    uint64_t get(IoOp op, IoCategory cat) const {
        return counts_[static_cast<std::size_t>(op)][static_cast<std::size_t>(cat)];
    }
    uint64_t total(IoOp op) const {
        uint64_t sum = 0;
        for (auto v : counts_[static_cast<std::size_t>(op)]) sum += v;
        return sum;
    }
    uint64_t reads() const { return total(IoOp::Read); }
    uint64_t writes() const { return total(IoOp::Write); }
    uint64_t erases() const { return total(IoOp::Erase); }
    // Reads issued by the FTL itself, i.e. everything except host data reads.
    uint64_t internal_reads() const { return reads() - get(IoOp::Read, IoCategory::User); }

    IoCounters operator-(const IoCounters& other) const {
        IoCounters out;
        for (std::size_t op = 0; op < 3; ++op)
            for (std::size_t c = 0; c < kIoCategoryCount; ++c)
                out.counts_[op][c] = counts_[op][c] - other.counts_[op][c];
        return out;
    }

private:
    std::array<std::array<uint64_t, kIoCategoryCount>, 3> counts_{};
};

} // namespace gecko
