#include "gecko/geometry.hpp"

namespace gecko {

void DeviceGeometry::validate() const {
    if (block_count < 4)
        throw UnsupportedGeometry("need at least 4 blocks, got " + std::to_string(block_count));
    if (pages_per_block < 2)
        throw UnsupportedGeometry("need at least 2 pages per block");
    if (page_bytes < 512 || (page_bytes & (page_bytes - 1)) != 0)
        throw UnsupportedGeometry("page size must be a power of two >= 512");
    if (over_provisioning < 0.0 || over_provisioning >= 1.0)
        throw UnsupportedGeometry("over-provisioning must be in [0, 1)");
    if (address_bytes == 0 || address_bytes > 8)
        throw UnsupportedGeometry("address size must be 1..8 bytes");
    if (page_bytes / address_bytes == 0)
        throw UnsupportedGeometry("page too small for one mapping entry");
    if (logical_pages() == 0)
        throw UnsupportedGeometry("no logical space left after over-provisioning");
    if (physical_pages() >= 0xFFFFFFFFull)
        throw UnsupportedGeometry("more physical pages than a packed address can hold");
    // A reverse page stores one entry per page of a block.
    if (pages_per_block > page_bytes / address_bytes)
        throw UnsupportedGeometry("reverse page cannot cover a whole block");
}

const char* to_string(BlockKind kind) {
    switch (kind) {
    case BlockKind::Free: return "free";
    case BlockKind::Data: return "data";
    case BlockKind::Translation: return "translation";
    case BlockKind::Reverse: return "reverse";
    case BlockKind::Gecko: return "gecko";
    case BlockKind::Queue: return "queue";
    }
    return "?";
}

const char* to_string(IoCategory cat) {
    switch (cat) {
    case IoCategory::User: return "user";
    case IoCategory::Translation: return "translation";
    case IoCategory::Reverse: return "reverse";
    case IoCategory::GcMigration: return "gc_migration";
    case IoCategory::Lsm: return "lsm";
    case IoCategory::Queue: return "queue";
    }
    return "?";
}

} // namespace gecko
