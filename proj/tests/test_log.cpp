#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gecko/errors.hpp"
#include "gecko/ftl.hpp"
#include "gecko/log_gecko.hpp"

using namespace gecko;

namespace {

FtlConfig cfg_small() {
    FtlConfig cfg;
    cfg.geometry = DeviceGeometry{64, 8, 512, 0.40, 4}; // 204 lbas
    cfg.scheme = SchemeKind::Logarithmic;
    cfg.cmt_entries_override = 24;
    return cfg;
}

LogGecko& scheme(Ftl& ftl) { return dynamic_cast<LogGecko&>(ftl.scheme()); }

void fill_all(Ftl& ftl) {
    for (uint64_t lba = 0; lba < ftl.oracle().logical_pages(); ++lba)
        ftl.write(static_cast<uint32_t>(lba));
}

uint32_t block_of(const Ftl& ftl, uint32_t lba) {
    return ftl.oracle().location(lba)->block_id;
}

// Overwrite every live page of a block with the mapping entries cached, so
// the invalidations land in the LSM immediately instead of being deferred.
void kill_block(Ftl& ftl, uint32_t b) {
    for (auto& lp : ftl.oracle().live_set(b)) {
        ftl.read(lp.lba);
        ftl.write(lp.lba);
    }
}

} // namespace

TEST_CASE("a collected block queries back as all-valid until new invalidations") {
    Ftl ftl(cfg_small());
    fill_all(ftl);
    uint32_t b = block_of(ftl, 0);
    kill_block(ftl, b);
    // Make it the selected victim (its live count is zero).
    ftl.run_gc_once();
    const GcRecord& rec = ftl.gc_records().back();
    REQUIRE(rec.victim == b);
    CHECK(rec.live_pages == 0);
    Bitmap bm = scheme(ftl).lsm().query(b);
    CHECK(bm.popcount() == 0); // erase flag masked the stale bits
}

TEST_CASE("victim selection: an empty candidate beats the internal blocks") {
    Ftl ftl(cfg_small());
    fill_all(ftl);
    uint32_t head = block_of(ftl, 0); // first-filled = queue head
    kill_block(ftl, head);
    CHECK(scheme(ftl).select_victim() == head);
}

TEST_CASE("victim selection: a cold candidate is put aside after three losses") {
    Ftl ftl(cfg_small());
    fill_all(ftl);
    uint32_t first = block_of(ftl, 0);
    uint32_t second = block_of(ftl, 8);
    REQUIRE(first != second);
    kill_block(ftl, second); // the block behind the cold head is empty
    REQUIRE(ftl.oracle().live_count(first) == 8);

    // The head candidate is fully live; internal blocks (stale translation
    // pages) win three rounds, then the candidate rotates out.
    for (int round = 0; round < 3; ++round) {
        uint32_t v = scheme(ftl).select_victim();
        CHECK(ftl.nand().block(v).kind() != BlockKind::Data);
    }
    CHECK(scheme(ftl).select_victim() == second);
}

TEST_CASE("fuzz: GC exactness, soundness and bounded identification reads") {
    FtlConfig cfg = cfg_small();
    Ftl ftl(cfg);
    uint32_t l_max = GeckoLsm::max_levels(cfg.geometry, cfg.lsm);

    uint64_t gc_checks = 0;
    ftl.gc_observer = [&](const GcEvent& ev) {
        REQUIRE(*ev.live == ftl.oracle().live_set(ev.victim));
        ++gc_checks;
    };

    std::mt19937_64 rng(91);
    fill_all(ftl);
    uint64_t lbas = ftl.oracle().logical_pages();
    for (int i = 0; i < 4000; ++i) {
        ftl.write(static_cast<uint32_t>(rng() % lbas));
        CHECK(scheme(ftl).lsm().run_count() <= l_max);
        // Soundness of the flash-resident map, sampled: a set bit is never a
        // live page.
        uint32_t b = static_cast<uint32_t>(rng() % cfg.geometry.block_count);
        if (ftl.nand().block(b).kind() == BlockKind::Data) {
            Bitmap bm = scheme(ftl).lsm().materialize_block_uncounted(b);
            for (uint32_t o = 0; o < cfg.geometry.pages_per_block; ++o)
                if (bm.test(o)) REQUIRE_FALSE(ftl.oracle().is_current({b, o}));
        }
    }
    CHECK(gc_checks > 50);

    // Identification cost: one reverse read plus at most one LSM read per run.
    uint64_t data_gcs = 0;
    for (const GcRecord& rec : ftl.gc_records()) {
        if (rec.kind != BlockKind::Data) continue;
        ++data_gcs;
        CHECK(rec.delta.get(IoOp::Read, IoCategory::Reverse) == 1);
        CHECK(rec.lsm_reads <= l_max);
    }
    CHECK(data_gcs > 20);
}

TEST_CASE("queue spill IO shows up under the queue category in a long run") {
    FtlConfig cfg;
    cfg.geometry = DeviceGeometry{512, 8, 512, 0.40, 4}; // 2457 lbas, 307 fills pre-GC
    cfg.scheme = SchemeKind::Logarithmic;
    cfg.cmt_entries_override = 64;
    Ftl ftl(cfg);
    std::mt19937_64 rng(101);
    fill_all(ftl);
    uint64_t lbas = ftl.oracle().logical_pages();
    for (int i = 0; i < 8000; ++i) ftl.write(static_cast<uint32_t>(rng() % lbas));
    uint64_t spill_writes = ftl.nand().counters().get(IoOp::Write, IoCategory::Queue);
    uint64_t spill_reads = ftl.nand().counters().get(IoOp::Read, IoCategory::Queue);
    uint64_t pushes = ftl.data_block_fills() + scheme(ftl).candidate_discards();
    CHECK(spill_writes >= 2);
    CHECK(spill_reads >= 1);
    // One queue write per page worth of queued block ids.
    CHECK(spill_writes <= pushes / (512 / 4) + 1);
}
