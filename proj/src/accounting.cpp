#include "gecko/accounting.hpp"

#include <cmath>
#include <cstdio>

#include "gecko/errors.hpp"

namespace gecko {

DeviceGeometry intel525_geometry() {
    return DeviceGeometry{1u << 16, 128, 4096, 0.07, 4};
}

DeviceGeometry micron_p420m_geometry() {
    return DeviceGeometry{1u << 18, 512, 16384, 0.30, 4};
}

static bool same_dimensions(const DeviceGeometry& a, const DeviceGeometry& b) {
    return a.block_count == b.block_count && a.pages_per_block == b.pages_per_block &&
           a.page_bytes == b.page_bytes;
}

// The published table gives internal-bitmap RAM only as per-device constants;
// for other geometries we estimate one bitmap per internal block plus the
// cached candidate.
static double cached_bitmap_estimate(const DeviceGeometry& geo) {
    if (same_dimensions(geo, micron_p420m_geometry())) return 15.0 * 1024;
    if (same_dimensions(geo, intel525_geometry())) return 4.0 * 1024;
    double bitmap_bytes = geo.pages_per_block / 8.0;
    double tpages = static_cast<double>(geo.translation_page_count());
    double translation_blocks = std::ceil(tpages / geo.pages_per_block);
    double reverse_blocks =
        std::ceil(static_cast<double>(geo.block_count) / geo.pages_per_block);
    double internal_blocks = translation_blocks + reverse_blocks + 4; // + gecko/queue slack
    return (internal_blocks + 1) * bitmap_bytes;
}

RamBreakdown ram_footprint(const DeviceGeometry& geo, const LsmConfig& lsm) {
    geo.validate();
    lsm.validate();
    RamBreakdown out;
    double a = geo.address_bytes;
    double p = geo.page_bytes;
    double k = geo.block_count;
    double b = geo.pages_per_block;
    double lba = static_cast<double>(geo.logical_pages());
    double pba = static_cast<double>(geo.physical_pages());

    out.gmd_bytes = a * (lba / (p / a));
    out.rmd_bytes = a * (pba / (p / a));
    out.pvb_bytes = (k * b) / 8.0;

    // LSM directory: one (location, first key) pair per tree page, budgeted
    // for two co-existing runs per level mid-merge.
    double tree_pages = k / (p / (a + b / 8.0));
    out.lgmd_bytes = 2.0 * a * tree_pages;
    out.queue_dir_bytes = 2.0 * a * ((k * a) / p);
    out.cached_bitmap_bytes = cached_bitmap_estimate(geo);

    double levels = tree_pages <= 1.0
                        ? 1.0
                        : std::ceil(std::log(tree_pages) /
                                    std::log(static_cast<double>(lsm.size_ratio)));
    out.buffer_levels = static_cast<uint32_t>(std::max(1.0, levels));
    out.page_buffer_bytes = p * (4.0 + out.buffer_levels);

    if (!std::isfinite(out.lazy_total()) || !std::isfinite(out.logarithmic_total()))
        throw UnsupportedGeometry("footprint formulas overflow");
    return out;
}

uint64_t fixed_structure_bytes(SchemeKind scheme, const DeviceGeometry& geo,
                               const LsmConfig& lsm) {
    switch (scheme) {
    case SchemeKind::Oracle:
    case SchemeKind::LazyIdeal:
        return 0; // every byte of the budget goes to the cache
    case SchemeKind::Lazy: {
        RamBreakdown r = ram_footprint(geo, lsm);
        return static_cast<uint64_t>(std::ceil(r.lazy_total()));
    }
    case SchemeKind::Logarithmic: {
        RamBreakdown r = ram_footprint(geo, lsm);
        return static_cast<uint64_t>(std::ceil(r.logarithmic_total()));
    }
    }
    return 0;
}

std::size_t cmt_capacity_for_budget(SchemeKind scheme, const DeviceGeometry& geo,
                                    const LsmConfig& lsm, uint64_t ram_budget_bytes) {
    uint64_t fixed = fixed_structure_bytes(scheme, geo, lsm);
    if (ram_budget_bytes < fixed + 8)
        throw InsufficientRam(std::string(to_string(scheme)) + " needs " +
                              std::to_string(fixed) +
                              " bytes of fixed structures plus cache, budget is " +
                              std::to_string(ram_budget_bytes));
    return static_cast<std::size_t>((ram_budget_bytes - fixed) / 8);
}

IoOverheadBounds io_overhead_bounds(const DeviceGeometry& geo, const LsmConfig& lsm) {
    geo.validate();
    lsm.validate();
    IoOverheadBounds out;
    double t = lsm.size_ratio;
    double arg = static_cast<double>(geo.physical_pages()) / geo.page_bytes;
    out.tree_depth = std::max(1.0, std::log(arg) / std::log(t));
    out.log_per_write_writes = (t * geo.pages_per_block / geo.page_bytes) * out.tree_depth;
    out.log_per_gc_reads = 1.0 + out.tree_depth;
    return out;
}

double AmplificationReport::wa() const {
    return static_cast<double>(io.writes()) / static_cast<double>(user_writes);
}

double AmplificationReport::ra() const {
    return static_cast<double>(io.internal_reads()) / static_cast<double>(user_writes);
}

double AmplificationReport::wa_fraction(IoCategory cat) const {
    uint64_t total = io.writes();
    if (total == 0) return 0.0;
    return static_cast<double>(io.get(IoOp::Write, cat)) / static_cast<double>(total);
}

double AmplificationReport::ra_fraction(IoCategory cat) const {
    uint64_t total = io.internal_reads();
    if (total == 0) return 0.0;
    return static_cast<double>(io.get(IoOp::Read, cat)) / static_cast<double>(total);
}

double AmplificationReport::ra_mapping_fraction() const {
    uint64_t total = io.internal_reads();
    if (total == 0) return 0.0;
    uint64_t mapping = io.get(IoOp::Read, IoCategory::Translation) +
                       io.get(IoOp::Read, IoCategory::Reverse);
    return static_cast<double>(mapping) / static_cast<double>(total);
}

double AmplificationReport::evictions_per_write() const {
    return static_cast<double>(evictions) / static_cast<double>(user_writes);
}

std::string csv_header() {
    return "scheme,ram_bytes,wa,ra,wa_lsm_frac,wa_reverse_frac,ra_lsm_frac,"
           "ra_mapping_frac,ra_gc_frac,evictions_per_write,erases";
}

static std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string csv_row(const std::string& scheme, uint64_t ram_bytes,
                    const AmplificationReport& rep) {
    std::string row = scheme + "," + std::to_string(ram_bytes) + ",";
    if (!rep.defined()) {
        for (int i = 0; i < 8; ++i) row += "NA,";
        row += "NA";
        return row;
    }
    row += fmt(rep.wa()) + "," + fmt(rep.ra()) + "," +
           fmt(rep.wa_fraction(IoCategory::Lsm)) + "," +
           fmt(rep.wa_fraction(IoCategory::Reverse)) + "," +
           fmt(rep.ra_fraction(IoCategory::Lsm)) + "," + fmt(rep.ra_mapping_fraction()) +
           "," + fmt(rep.ra_fraction(IoCategory::GcMigration)) + "," +
           fmt(rep.evictions_per_write()) + "," + std::to_string(rep.erases());
    return row;
}

} // namespace gecko
