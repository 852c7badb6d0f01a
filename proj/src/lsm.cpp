#include "gecko/lsm.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "gecko/errors.hpp"
#include "gecko/ftl.hpp"

namespace gecko {

GeckoEntry merge_entries(const GeckoEntry& newer, const GeckoEntry& older) {
    assert(newer.block_id == older.block_id);
    if (newer.erase_flag)
        return newer; // everything older predates the erase
    GeckoEntry out = newer;
    out.bitmap.or_with(older.bitmap);
    out.erase_flag = older.erase_flag;
    return out;
}

void LsmConfig::validate() const {
    if (size_ratio < 2)
        throw ConfigError("LSM size ratio must be at least 2");
}

uint32_t raw_entry_bytes(const DeviceGeometry& geo) {
    return geo.address_bytes + (geo.pages_per_block + 7) / 8 + 1;
}

uint32_t compressed_entry_bytes(const DeviceGeometry& geo) {
    return geo.address_bytes * 2;
}

static uint32_t compressed_slots(const DeviceGeometry& geo) {
    return std::max<uint32_t>(1, geo.address_bytes / 2);
}

bool entry_compressible(const GeckoEntry& e, const LsmConfig& cfg) {
    uint32_t used = static_cast<uint32_t>(e.bitmap.popcount()) + (e.erase_flag ? 1 : 0);
    return used <= cfg.compress_max_bits;
}

uint32_t encoded_entry_bytes(const GeckoEntry& e, const DeviceGeometry& geo,
                             const LsmConfig& cfg, bool compressed_run) {
    if (compressed_run && entry_compressible(e, cfg) &&
        e.bitmap.popcount() + (e.erase_flag ? 1u : 0u) <= compressed_slots(geo))
        return compressed_entry_bytes(geo);
    return raw_entry_bytes(geo);
}

// Offset-list encoding: 0xFFFE marks the erase flag, page offsets are stored
// verbatim (so pages-per-block must stay below 0xFFFE).
static constexpr uint16_t kEraseMarker = 0xFFFE;

std::vector<uint16_t> compress_entry(const GeckoEntry& e) {
    std::vector<uint16_t> words;
    if (e.erase_flag) words.push_back(kEraseMarker);
    for (uint16_t o : e.bitmap.set_offsets()) words.push_back(o);
    return words;
}

GeckoEntry decompress_entry(uint32_t block_id, const std::vector<uint16_t>& words,
                            uint32_t pages_per_block) {
    GeckoEntry e(block_id, pages_per_block);
    for (uint16_t w : words) {
        if (w == kEraseMarker)
            e.erase_flag = true;
        else
            e.bitmap.set(w);
    }
    return e;
}

GeckoLsm::GeckoLsm(Ftl& ftl, LsmConfig cfg)
    : ftl_(ftl),
      cfg_(cfg),
      pages_per_block_(ftl.nand().geometry().pages_per_block),
      page_bytes_(ftl.nand().geometry().page_bytes),
      buffer_compressed_accounting_(cfg.compression_levels >= 1) {
    cfg_.validate();
    if (raw_entry_bytes(ftl.nand().geometry()) > page_bytes_)
        throw UnsupportedGeometry("one validity entry does not fit in a flash page");
    if (pages_per_block_ >= kEraseMarker)
        throw UnsupportedGeometry("block too long for offset compression");
}

uint32_t GeckoLsm::level_of_size(uint32_t pages) const {
    assert(pages >= 1);
    uint32_t level = 1;
    uint64_t bound = cfg_.size_ratio; // level i holds up to T^i - 1 pages
    while (pages >= bound) {
        bound *= cfg_.size_ratio;
        ++level;
    }
    return level;
}

uint32_t GeckoLsm::buffer_entry_bytes(const GeckoEntry& e) const {
    return encoded_entry_bytes(e, ftl_.nand().geometry(), cfg_, buffer_compressed_accounting_);
}

void GeckoLsm::insert_or_update(uint32_t block_id, uint32_t set_offset, bool rewrite) {
    auto it = buffer_.find(block_id);
    if (it == buffer_.end()) {
        GeckoEntry e(block_id, pages_per_block_);
        if (rewrite)
            e.erase_flag = true;
        else
            e.bitmap.set(set_offset);
        uint32_t bytes = buffer_entry_bytes(e);
        if (buffer_bytes_ + bytes > page_bytes_)
            flush_buffer();
        buffer_.emplace(block_id, std::move(e));
        buffer_bytes_ += bytes;
        return;
    }
    GeckoEntry& e = it->second;
    uint32_t old_bytes = buffer_entry_bytes(e);
    if (rewrite) {
        e.bitmap.clear();
        e.erase_flag = true;
    } else {
        e.bitmap.set(set_offset);
    }
    uint32_t new_bytes = buffer_entry_bytes(e);
    buffer_bytes_ += new_bytes - old_bytes;
    if (buffer_bytes_ > page_bytes_) {
        GeckoEntry moved = std::move(e);
        buffer_bytes_ -= new_bytes;
        buffer_.erase(it);
        flush_buffer();
        buffer_bytes_ += new_bytes;
        buffer_.emplace(block_id, std::move(moved));
    }
}

void GeckoLsm::note_invalidate(PhysicalAddress pa) {
    ++invalidate_events_;
    insert_or_update(pa.block_id, pa.page_offset, false);
}

void GeckoLsm::note_block_rewritten(uint32_t block_id) {
    insert_or_update(block_id, 0, true);
}

void GeckoLsm::flush_buffer() {
    if (buffer_.empty()) return;
    std::vector<GeckoEntry> entries;
    entries.reserve(buffer_.size());
    for (auto& [id, e] : buffer_) entries.push_back(std::move(e));
    buffer_.clear();
    buffer_bytes_ = 0;
    ++flushes_;
    emit_run(std::move(entries), buffer_compressed_accounting_);
    maybe_merge();
}

void GeckoLsm::emit_run(std::vector<GeckoEntry> entries, bool compressed) {
    assert(!entries.empty());
    const DeviceGeometry& geo = ftl_.nand().geometry();
    SortedRun run;
    run.seq = next_seq_++;
    run.compressed = compressed;
    std::size_t i = 0;
    while (i < entries.size()) {
        std::vector<GeckoEntry> page_entries;
        uint32_t used = 0;
        while (i < entries.size()) {
            uint32_t bytes = encoded_entry_bytes(entries[i], geo, cfg_, compressed);
            if (used + bytes > page_bytes_ && !page_entries.empty()) break;
            used += bytes;
            page_entries.push_back(std::move(entries[i]));
            ++i;
        }
        GeckoPagePayload payload;
        payload.run_seq = run.seq;
        payload.compressed = compressed;
        run.first_keys.push_back(page_entries.front().block_id);
        payload.entries = std::move(page_entries);
        PhysicalAddress pa = ftl_.program_on_frontier(BlockKind::Gecko, run.seq,
                                                      std::move(payload), IoCategory::Lsm);
        run.pages.push_back(pa);
    }
    run.level = level_of_size(run.page_count());
    runs_.push_back(std::move(run));
}

void GeckoLsm::discard_run(const SortedRun& run) {
    for (PhysicalAddress pa : run.pages) ftl_.note_internal_stale(pa);
}

std::vector<GeckoEntry> GeckoLsm::read_run_page(const SortedRun& run, std::size_t page,
                                                IoCategory cat) {
    const FlashPage& fp = ftl_.nand().read_page(run.pages[page], cat);
    return std::any_cast<const GeckoPagePayload&>(fp.payload).entries;
}

void GeckoLsm::maybe_merge() {
    for (;;) {
        // Group run indexes by level.
        std::map<uint32_t, std::vector<std::size_t>> by_level;
        for (std::size_t i = 0; i < runs_.size(); ++i)
            by_level[runs_[i].level].push_back(i);
        std::size_t base_level = 0;
        for (auto& [level, idxs] : by_level) {
            if (idxs.size() >= 2) {
                base_level = level;
                break;
            }
        }
        if (base_level == 0) return;

        std::vector<std::size_t> participants = by_level[base_level];
        if (!cascade_mode_) {
            // Multi-way: pull in the resident run of each level above while
            // the participants one level below are jointly large enough that
            // the merge would spill into it anyway.
            uint64_t t = cfg_.size_ratio;
            uint64_t t_prev = 1; // T^(i-1) with i starting at base_level
            for (uint32_t l = 1; l < base_level; ++l) t_prev *= t;
            uint64_t below_pages = 0;
            for (std::size_t idx : participants) below_pages += runs_[idx].page_count();
            for (uint32_t level = base_level + 1;; ++level) {
                auto it = by_level.find(level);
                if (it == by_level.end() || it->second.empty()) break;
                uint64_t t_here = t_prev * t; // T^(i-1) for this level
                uint64_t threshold = t_here * t - t_here; // T^i - T^(i-1)
                if (below_pages < threshold) break;
                assert(it->second.size() == 1);
                participants.push_back(it->second.front());
                below_pages = runs_[it->second.front()].page_count();
                t_prev = t_here;
            }
        }
        merge_once(std::move(participants));
    }
}

void GeckoLsm::merge_once(std::vector<std::size_t> participant_indexes) {
    // Newest first: recency decides which entry wins on duplicate keys.
    std::sort(participant_indexes.begin(), participant_indexes.end(),
              [&](std::size_t a, std::size_t b) { return runs_[a].seq > runs_[b].seq; });

    struct Cursor {
        const SortedRun* run = nullptr;
        std::size_t page = 0;
        std::size_t pos = 0;
        std::vector<GeckoEntry> entries;
    };
    std::vector<Cursor> cursors;
    uint64_t input_pages = 0;
    for (std::size_t idx : participant_indexes) {
        Cursor c;
        c.run = &runs_[idx];
        cursors.push_back(std::move(c));
        input_pages += runs_[idx].page_count();
    }
    auto ensure_loaded = [&](Cursor& c) {
        while (c.pos >= c.entries.size()) {
            if (c.page >= c.run->pages.size()) return false;
            c.entries = read_run_page(*c.run, c.page, IoCategory::Lsm);
            c.pos = 0;
            ++c.page;
        }
        return true;
    };

    bool out_compressed =
        cfg_.compression_levels > 0 &&
        level_of_size(static_cast<uint32_t>(input_pages)) <= cfg_.compression_levels;

    std::vector<GeckoEntry> output;
    for (;;) {
        uint32_t min_key = 0xFFFFFFFFu;
        bool any = false;
        for (auto& c : cursors) {
            if (!ensure_loaded(c)) continue;
            uint32_t k = c.entries[c.pos].block_id;
            if (!any || k < min_key) {
                min_key = k;
                any = true;
            }
        }
        if (!any) break;
        bool have = false;
        GeckoEntry acc;
        for (auto& c : cursors) { // newest to oldest
            if (!ensure_loaded(c)) continue;
            if (c.entries[c.pos].block_id != min_key) continue;
            if (!have) {
                acc = std::move(c.entries[c.pos]);
                have = true;
            } else {
                acc = merge_entries(acc, c.entries[c.pos]);
            }
            ++c.pos;
        }
        output.push_back(std::move(acc));
    }

    // Drop the inputs, newest-first indexes sorted descending for safe erase.
    std::vector<std::size_t> doomed = participant_indexes;
    std::sort(doomed.begin(), doomed.end(), std::greater<>());
    for (std::size_t idx : doomed) {
        discard_run(runs_[idx]);
        runs_.erase(runs_.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    ++merges_;
    emit_run(std::move(output), out_compressed);
}

Bitmap GeckoLsm::query(uint32_t block_id, uint32_t* reads_out) {
    uint32_t reads = 0;
    Bitmap acc(pages_per_block_);
    bool stop = false;
    auto fold = [&](const GeckoEntry& e) {
        acc.or_with(e.bitmap);
        if (e.erase_flag) stop = true;
    };
    auto buffered = buffer_.find(block_id);
    if (buffered != buffer_.end()) fold(buffered->second);

    if (!stop) {
        std::vector<const SortedRun*> ordered;
        for (const auto& r : runs_) ordered.push_back(&r);
        std::sort(ordered.begin(), ordered.end(),
                  [](const SortedRun* a, const SortedRun* b) { return a->seq > b->seq; });
        for (const SortedRun* run : ordered) {
            if (stop) break;
            if (run->first_keys.empty() || block_id < run->first_keys.front())
                continue; // the directory rules this run out without IO
            auto it = std::upper_bound(run->first_keys.begin(), run->first_keys.end(), block_id);
            std::size_t page = static_cast<std::size_t>(it - run->first_keys.begin()) - 1;
            std::vector<GeckoEntry> entries = read_run_page(*run, page, IoCategory::Lsm);
            ++reads;
            auto pos = std::lower_bound(entries.begin(), entries.end(), block_id,
                                        [](const GeckoEntry& e, uint32_t k) {
                                            return e.block_id < k;
                                        });
            if (pos != entries.end() && pos->block_id == block_id) fold(*pos);
        }
    }
    if (reads_out) *reads_out = reads;
    return acc;
}

Bitmap GeckoLsm::materialize_block_uncounted(uint32_t block_id) const {
    Bitmap acc(pages_per_block_);
    bool stop = false;
    auto fold = [&](const GeckoEntry& e) {
        acc.or_with(e.bitmap);
        if (e.erase_flag) stop = true;
    };
    auto buffered = buffer_.find(block_id);
    if (buffered != buffer_.end()) fold(buffered->second);
    if (!stop) {
        std::vector<const SortedRun*> ordered;
        for (const auto& r : runs_) ordered.push_back(&r);
        std::sort(ordered.begin(), ordered.end(),
                  [](const SortedRun* a, const SortedRun* b) { return a->seq > b->seq; });
        for (const SortedRun* run : ordered) {
            if (stop) break;
            if (run->first_keys.empty() || block_id < run->first_keys.front()) continue;
            auto it = std::upper_bound(run->first_keys.begin(), run->first_keys.end(), block_id);
            std::size_t page = static_cast<std::size_t>(it - run->first_keys.begin()) - 1;
            const FlashPage& fp = ftl_.nand().peek_page(run->pages[page]);
            const auto& entries = std::any_cast<const GeckoPagePayload&>(fp.payload).entries;
            auto pos = std::lower_bound(entries.begin(), entries.end(), block_id,
                                        [](const GeckoEntry& e, uint32_t k) {
                                            return e.block_id < k;
                                        });
            if (pos != entries.end() && pos->block_id == block_id) fold(*pos);
        }
    }
    return acc;
}

std::vector<std::pair<std::size_t, std::size_t>> GeckoLsm::pages_on_block(
    uint32_t block_id) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t r = 0; r < runs_.size(); ++r)
        for (std::size_t p = 0; p < runs_[r].pages.size(); ++p)
            if (runs_[r].pages[p].block_id == block_id) out.emplace_back(r, p);
    return out;
}

void GeckoLsm::migrate_page(std::size_t run_index, std::size_t page_index) {
    SortedRun& run = runs_[run_index];
    PhysicalAddress old = run.pages[page_index];
    const FlashPage& fp = ftl_.nand().read_page(old, IoCategory::GcMigration);
    GeckoPagePayload payload = std::any_cast<const GeckoPagePayload&>(fp.payload);
    PhysicalAddress npa = ftl_.program_on_frontier(BlockKind::Gecko, run.seq,
                                                   std::move(payload), IoCategory::GcMigration);
    ftl_.note_internal_stale(old);
    run.pages[page_index] = npa;
}

uint32_t GeckoLsm::max_levels(const DeviceGeometry& geo, const LsmConfig& cfg) {
    double pages = static_cast<double>(geo.physical_pages()) / geo.page_bytes *
                   (geo.pages_per_block / 8.0);
    if (pages <= 1.0) return 1;
    double levels = std::ceil(std::log(pages) / std::log(static_cast<double>(cfg.size_ratio)));
    return std::max(1u, static_cast<uint32_t>(levels));
}

} // namespace gecko
