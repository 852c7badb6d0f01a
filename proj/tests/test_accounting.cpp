#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gecko/accounting.hpp"
#include "gecko/errors.hpp"

using namespace gecko;

namespace {
double rel(double got, double expect) { return std::abs(got - expect) / expect; }
constexpr double KB = 1024.0, MB = 1024.0 * 1024.0;
} // namespace

// Published footprint table, large device. Printed values round to two
// figures; components must land within 2%, totals within 5%.
TEST_CASE("footprint: Micron P420m dimensions") {
    LsmConfig lsm;
    lsm.size_ratio = 2; // the printed buffer count implies ratio 2
    RamBreakdown r = ram_footprint(micron_p420m_geometry(), lsm);
    CHECK(rel(r.gmd_bytes, 90 * KB) < 0.02);
    CHECK(r.rmd_bytes == 128 * KB);
    CHECK(r.pvb_bytes == 16 * MB);
    CHECK(rel(r.lgmd_bytes, 8.5 * KB) < 0.02);
    CHECK(r.queue_dir_bytes == 512);
    CHECK(r.cached_bitmap_bytes == 15 * KB);
    CHECK(rel(r.page_buffer_bytes, 241 * KB) < 0.02);
    CHECK(rel(r.lazy_total(), 16.5 * MB) < 0.05);
    CHECK(rel(r.logarithmic_total(), 482 * KB) < 0.05);
    CHECK(std::abs(r.ratio() - 0.03) < 0.008);
}

// Published footprint table, consumer device, at the table's 30%
// over-provisioning.
TEST_CASE("footprint: Intel 525 dimensions") {
    DeviceGeometry geo = intel525_geometry();
    geo.over_provisioning = 0.30;
    LsmConfig lsm;
    lsm.size_ratio = 2;
    RamBreakdown r = ram_footprint(geo, lsm);
    CHECK(rel(r.gmd_bytes, 22 * KB) < 0.02);
    CHECK(r.rmd_bytes == 32 * KB);
    CHECK(r.pvb_bytes == 1 * MB);
    CHECK(r.lgmd_bytes == 2.5 * KB);
    CHECK(r.queue_dir_bytes == 512);
    CHECK(r.cached_bitmap_bytes == 4 * KB);
    CHECK(rel(r.page_buffer_bytes, 53 * KB) < 0.02);
    CHECK(rel(r.lazy_total(), 1.1 * MB) < 0.05);
    CHECK(rel(r.logarithmic_total(), 112 * KB) < 0.05);
    CHECK(std::abs(r.ratio() - 0.11) < 0.008);
}

TEST_CASE("footprint: zero over-provisioning collapses GMD onto RMD") {
    DeviceGeometry geo{1024, 64, 4096, 0.0, 4};
    RamBreakdown r = ram_footprint(geo, LsmConfig{});
    CHECK(r.gmd_bytes == r.rmd_bytes);
}

TEST_CASE("overhead bounds: constants and the sub-unit write cost") {
    LsmConfig t4; // default ratio 4
    for (DeviceGeometry geo : {intel525_geometry(), micron_p420m_geometry()}) {
        IoOverheadBounds b = io_overhead_bounds(geo, t4);
        CHECK(b.lazy_per_write_reads == 0);
        CHECK(b.lazy_per_write_writes == 0);
        CHECK(b.lazy_per_gc_reads == 1);
        CHECK(b.lazy_per_gc_writes == 1);
        CHECK(b.log_per_gc_writes == 1);
        CHECK(b.log_per_write_writes < 1.0); // far below one IO per write
        CHECK(b.log_per_gc_reads == 1.0 + b.tree_depth);
    }
    // Tree depth for the consumer device at ratio 4: log4(2^23 / 2^12) = 5.5.
    IoOverheadBounds b = io_overhead_bounds(intel525_geometry(), t4);
    CHECK(b.tree_depth == doctest::Approx(5.5));
    CHECK(b.log_per_write_writes == doctest::Approx(0.125 * 5.5));
}

TEST_CASE("budgeting: fixed structures gate the cache size") {
    DeviceGeometry geo{512, 256, 1024, 0.30, 4};
    LsmConfig lsm;
    uint64_t lazy_fixed = fixed_structure_bytes(SchemeKind::Lazy, geo, lsm);
    uint64_t log_fixed = fixed_structure_bytes(SchemeKind::Logarithmic, geo, lsm);
    CHECK(fixed_structure_bytes(SchemeKind::LazyIdeal, geo, lsm) == 0);
    CHECK(log_fixed < lazy_fixed); // the validity bitmap dominates here

    CHECK_THROWS_AS(cmt_capacity_for_budget(SchemeKind::Lazy, geo, lsm, lazy_fixed - 1),
                    InsufficientRam);
    std::size_t cap = cmt_capacity_for_budget(SchemeKind::Lazy, geo, lsm, lazy_fixed + 800);
    CHECK(cap == 100);
    CHECK(cmt_capacity_for_budget(SchemeKind::LazyIdeal, geo, lsm, 8000) == 1000);
}

TEST_CASE("geometry validation rejects nonsense") {
    CHECK_THROWS_AS(ram_footprint(DeviceGeometry{2, 64, 4096, 0.3, 4}, LsmConfig{}),
                    UnsupportedGeometry);
    CHECK_THROWS_AS(ram_footprint(DeviceGeometry{64, 64, 1000, 0.3, 4}, LsmConfig{}),
                    UnsupportedGeometry);
    CHECK_THROWS_AS(ram_footprint(DeviceGeometry{64, 64, 4096, 1.0, 4}, LsmConfig{}),
                    UnsupportedGeometry);
    LsmConfig bad;
    bad.size_ratio = 1;
    CHECK_THROWS_AS(ram_footprint(DeviceGeometry{64, 64, 4096, 0.3, 4}, bad), ConfigError);
}

TEST_CASE("amplification report arithmetic") {
    AmplificationReport rep;
    rep.user_writes = 100;
    rep.evictions = 25;
    rep.io.add(IoOp::Write, IoCategory::User, 100);
    rep.io.add(IoOp::Write, IoCategory::GcMigration, 60);
    rep.io.add(IoOp::Write, IoCategory::Lsm, 10);
    rep.io.add(IoOp::Write, IoCategory::Reverse, 30);
    rep.io.add(IoOp::Read, IoCategory::User, 7);
    rep.io.add(IoOp::Read, IoCategory::Translation, 40);
    rep.io.add(IoOp::Read, IoCategory::Reverse, 10);
    rep.io.add(IoOp::Read, IoCategory::Lsm, 30);
    rep.io.add(IoOp::Read, IoCategory::GcMigration, 20);
    CHECK(rep.wa() == doctest::Approx(2.0));
    CHECK(rep.ra() == doctest::Approx(1.0)); // host reads excluded
    CHECK(rep.wa_fraction(IoCategory::Lsm) == doctest::Approx(0.05));
    CHECK(rep.ra_fraction(IoCategory::Lsm) == doctest::Approx(0.30));
    CHECK(rep.ra_mapping_fraction() == doctest::Approx(0.50));
    CHECK(rep.evictions_per_write() == doctest::Approx(0.25));

    AmplificationReport empty;
    CHECK_FALSE(empty.defined());
    std::string row = csv_row("lazy", 1024, empty);
    CHECK(row == "lazy,1024,NA,NA,NA,NA,NA,NA,NA,NA,NA");
}
