#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "gecko/errors.hpp"
#include "gecko/nand.hpp"

using namespace gecko;

namespace {
DeviceGeometry small_geo() { return DeviceGeometry{8, 16, 512, 0.25, 4}; }
}

TEST_CASE("program: first write advances the write pointer") {
    NandDevice nand(small_geo());
    uint32_t b = nand.allocate_block(BlockKind::Data);
    nand.program_page({b, 0}, 42, std::any{}, IoCategory::User);
    CHECK(nand.block(b).write_pointer() == 1);
}

TEST_CASE("program: non-sequential offset rejected") {
    NandDevice nand(small_geo());
    uint32_t b = nand.allocate_block(BlockKind::Data);
    CHECK_THROWS_AS(nand.program_page({b, 2}, 0, std::any{}, IoCategory::User),
                    NonSequentialWrite);
}

TEST_CASE("program: write to unallocated block rejected") {
    NandDevice nand(small_geo());
    CHECK_THROWS_AS(nand.program_page({3, 0}, 0, std::any{}, IoCategory::User),
                    WriteToFreeBlock);
}

TEST_CASE("program: a 128-page block fills after 128 in-order writes") {
    NandDevice nand(DeviceGeometry{8, 128, 4096, 0.25, 4});
    uint32_t b = nand.allocate_block(BlockKind::Data);
    for (uint32_t o = 0; o < 128; ++o)
        nand.program_page({b, o}, o, std::any{}, IoCategory::User);
    CHECK(nand.block(b).write_pointer() == 128);
    CHECK(nand.is_full(b));
    CHECK_FALSE(nand.is_frontier(b));
}

TEST_CASE("read: read-your-write") {
    NandDevice nand(small_geo());
    uint32_t b = nand.allocate_block(BlockKind::Data);
    nand.program_page({b, 0}, 7, std::any{uint64_t{123}}, IoCategory::User);
    const FlashPage& p = nand.read_page({b, 0}, IoCategory::User);
    CHECK(p.tag == 7);
    CHECK(std::any_cast<uint64_t>(p.payload) == 123);
}

TEST_CASE("read: unwritten offset rejected") {
    NandDevice nand(small_geo());
    uint32_t b = nand.allocate_block(BlockKind::Data);
    for (uint32_t o = 0; o < 3; ++o)
        nand.program_page({b, o}, o, std::any{}, IoCategory::User);
    CHECK_THROWS_AS(nand.read_page({b, 5}, IoCategory::User), ReadUnwritten);
}

TEST_CASE("read/program fuzz against a shadow map") {
    NandDevice nand(small_geo());
    std::mt19937_64 rng(99);
    std::map<uint64_t, uint64_t> shadow; // page index -> payload
    std::vector<uint32_t> open_blocks;
    for (int i = 0; i < 4; ++i) open_blocks.push_back(nand.allocate_block(BlockKind::Data));
    std::vector<std::pair<PhysicalAddress, uint64_t>> written;
    for (int i = 0; i < 1000; ++i) {
        if (written.empty() || rng() % 2 == 0) {
            uint32_t b = open_blocks[rng() % open_blocks.size()];
            if (nand.is_full(b)) continue;
            PhysicalAddress pa{b, nand.block(b).write_pointer()};
            uint64_t payload = rng();
            nand.program_page(pa, payload & 0xFFFF, std::any{payload}, IoCategory::User);
            written.emplace_back(pa, payload);
        } else {
            auto& [pa, expect] = written[rng() % written.size()];
            CHECK(std::any_cast<uint64_t>(nand.read_page(pa, IoCategory::User).payload) ==
                  expect);
        }
    }
}

TEST_CASE("erase: resets the block and counts") {
    NandDevice nand(small_geo());
    uint32_t b = nand.allocate_block(BlockKind::Data);
    for (uint32_t o = 0; o < 16; ++o)
        nand.program_page({b, o}, o, std::any{}, IoCategory::User);
    nand.erase_block(b, IoCategory::GcMigration);
    CHECK(nand.block(b).write_pointer() == 0);
    CHECK(nand.block(b).erase_count() == 1);
    CHECK(nand.block(b).kind() == BlockKind::Free);

    // Erase-before-write: the block is reusable once re-allocated.
    uint32_t again;
    do {
        again = nand.allocate_block(BlockKind::Data);
    } while (again != b && nand.free_block_count() > 0);
    REQUIRE(again == b);
    nand.program_page({b, 0}, 1, std::any{}, IoCategory::User);
    CHECK(nand.block(b).write_pointer() == 1);
}

TEST_CASE("erase: counts accumulate per block") {
    NandDevice nand(small_geo());
    // Cycle every block through fill+erase three times; the erase counter is
    // the counting oracle.
    for (uint32_t pass = 1; pass <= 3; ++pass) {
        for (int i = 0; i < 8; ++i) {
            uint32_t b = nand.allocate_block(BlockKind::Data);
            for (uint32_t o = 0; o < 16; ++o)
                nand.program_page({b, o}, o, std::any{}, IoCategory::User);
            nand.erase_block(b, IoCategory::GcMigration);
            CHECK(nand.block(b).erase_count() == pass);
        }
    }
    CHECK(nand.total_erases() == 24);
}

TEST_CASE("erase: active frontier cannot be erased") {
    NandDevice nand(small_geo());
    uint32_t b = nand.allocate_block(BlockKind::Data);
    nand.program_page({b, 0}, 0, std::any{}, IoCategory::User);
    CHECK_THROWS_AS(nand.erase_block(b, IoCategory::GcMigration), EraseActiveBlock);
}

TEST_CASE("allocate: pool shrinks by one") {
    NandDevice nand(small_geo());
    std::size_t before = nand.free_block_count();
    nand.allocate_block(BlockKind::Data);
    CHECK(nand.free_block_count() == before - 1);
}

TEST_CASE("allocate: exhausting the pool") {
    NandDevice nand(small_geo());
    for (uint32_t i = 0; i < 8; ++i) nand.allocate_block(BlockKind::Data);
    CHECK(nand.free_block_count() == 0);
    CHECK_THROWS_AS(nand.allocate_block(BlockKind::Data), OutOfFreeBlocks);
}

TEST_CASE("counters: category writes sum to total programs") {
    NandDevice nand(small_geo());
    std::mt19937_64 rng(3);
    IoCategory cats[] = {IoCategory::User, IoCategory::Translation, IoCategory::Lsm};
    for (int round = 0; round < 6; ++round) {
        uint32_t b = nand.allocate_block(BlockKind::Data);
        for (uint32_t o = 0; o < 16; ++o)
            nand.program_page({b, o}, o, std::any{}, cats[rng() % 3]);
    }
    CHECK(nand.counters().writes() == nand.total_programs());
    CHECK(nand.total_programs() == 6 * 16);
}
