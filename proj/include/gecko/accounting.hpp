#pragma once

#include <cstdint>
#include <string>

#include "gecko/ftl.hpp"
#include "gecko/geometry.hpp"
#include "gecko/lsm.hpp"

namespace gecko {

// RAM-resident structure sizes for one geometry, in bytes. Formulas follow
// the published breakdown; sizes can be fractional bytes before rounding.
struct RamBreakdown {
    double gmd_bytes = 0;           // global mapping directory
    double rmd_bytes = 0;           // reverse mapping directory
    double pvb_bytes = 0;           // flat page validity bitmap (lazy)
    double lgmd_bytes = 0;          // LSM page directory (logarithmic)
    double queue_dir_bytes = 0;     // spilled-queue directory
    double cached_bitmap_bytes = 0; // internal-block + candidate bitmaps
    double page_buffer_bytes = 0;   // merge/queue/flush page buffers
    uint32_t buffer_levels = 0;     // L used in the page-buffer row

    double lazy_total() const { return gmd_bytes + rmd_bytes + pvb_bytes; }
    double logarithmic_total() const {
        return gmd_bytes + rmd_bytes + lgmd_bytes + queue_dir_bytes +
               cached_bitmap_bytes + page_buffer_bytes;
    }
    double ratio() const { return logarithmic_total() / lazy_total(); }
};

RamBreakdown ram_footprint(const DeviceGeometry& geo, const LsmConfig& lsm);

// Fixed (non-cache) RAM required by a scheme; the rest of the budget funds
// the cached mapping table at 8 bytes per entry.
uint64_t fixed_structure_bytes(SchemeKind scheme, const DeviceGeometry& geo,
                               const LsmConfig& lsm);
std::size_t cmt_capacity_for_budget(SchemeKind scheme, const DeviceGeometry& geo,
                                    const LsmConfig& lsm, uint64_t ram_budget_bytes);

// Closed-form per-write and per-GC IO ceilings.
struct IoOverheadBounds {
    double lazy_per_write_reads = 0;
    double lazy_per_write_writes = 0;
    double lazy_per_gc_reads = 1;
    double lazy_per_gc_writes = 1;
    double log_per_write_writes = 0; // (T*B/P) * log_T(K*B/P)
    double log_per_gc_reads = 0;     // 1 + log_T(K*B/P)
    double log_per_gc_writes = 1;
    double tree_depth = 0;           // log_T(K*B/P)
};

IoOverheadBounds io_overhead_bounds(const DeviceGeometry& geo, const LsmConfig& lsm);

// Measured amplification over a run window.
struct AmplificationReport {
    uint64_t user_writes = 0;
    uint64_t evictions = 0;
    IoCounters io;

    bool defined() const { return user_writes > 0; }
    double wa() const;
    double ra() const; // internal (non-host) reads per user write
    double wa_fraction(IoCategory cat) const;
    double ra_fraction(IoCategory cat) const;   // share of internal reads
    double ra_mapping_fraction() const;         // translation + reverse reads
    double evictions_per_write() const;
    uint64_t erases() const { return io.erases(); }
};

std::string csv_header();
std::string csv_row(const std::string& scheme, uint64_t ram_bytes,
                    const AmplificationReport& rep);

// Known device presets.
DeviceGeometry intel525_geometry();
DeviceGeometry micron_p420m_geometry();

} // namespace gecko
