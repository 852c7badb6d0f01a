#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gecko/geometry.hpp"

namespace gecko {

struct LivePage {
    uint32_t page_offset = 0;
    uint32_t lba = 0;
    bool operator==(const LivePage&) const = default;
    bool operator<(const LivePage& o) const {
        return page_offset < o.page_offset ||
               (page_offset == o.page_offset && lba < o.lba);
    }
};

// Idealized in-RAM FTL state: the full page mapping plus exact per-page
// validity. Runs in shadow mode next to the scheme under test (observes
// events, issues no IOs) and doubles as the abundant-RAM baseline.
class ShadowOracle {
public:
    static constexpr uint32_t kNone = 0xFFFFFFFFu;

    explicit ShadowOracle(const DeviceGeometry& geo);

    void on_write(uint32_t lba, PhysicalAddress pa);
    void on_migrate(uint32_t lba, PhysicalAddress from, PhysicalAddress to);
    void on_erase(uint32_t block_id);

    std::optional<PhysicalAddress> location(uint32_t lba) const;
    // True if some lba currently maps to this page.
    bool is_current(PhysicalAddress pa) const;
    uint32_t live_count(uint32_t block_id) const { return live_counts_[block_id]; }

    // Exact live set, from the per-page holder table.
    std::vector<LivePage> live_set(uint32_t block_id) const;
    // Same result derived by scanning the whole page mapping.
    std::vector<LivePage> live_set_by_map_scan(uint32_t block_id) const;
    // Same result derived the reverse-map way: given the logical tags last
    // written at each offset of the block, keep those the mapping confirms.
    std::vector<LivePage> live_set_by_reverse_check(uint32_t block_id,
                                                    std::span<const uint64_t> tags) const;

    uint64_t logical_pages() const { return lba_to_page_.size(); }

private:
    DeviceGeometry geo_;
    std::vector<uint32_t> lba_to_page_; // packed page index or kNone
    std::vector<uint32_t> page_to_lba_; // current holder or kNone
    std::vector<uint32_t> live_counts_;
};

} // namespace gecko
