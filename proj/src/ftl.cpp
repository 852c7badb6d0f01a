#include "gecko/ftl.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>

#include "gecko/accounting.hpp"
#include "gecko/errors.hpp"
#include "gecko/lazy_gecko.hpp"
#include "gecko/log_gecko.hpp"

namespace gecko {

SchemeKind parse_scheme(const std::string& name) {
    if (name == "oracle") return SchemeKind::Oracle;
    if (name == "lazy_ideal") return SchemeKind::LazyIdeal;
    if (name == "lazy") return SchemeKind::Lazy;
    if (name == "logarithmic") return SchemeKind::Logarithmic;
    throw ConfigError("unknown scheme '" + name + "'");
}

const char* to_string(SchemeKind kind) {
    switch (kind) {
    case SchemeKind::Oracle: return "oracle";
    case SchemeKind::LazyIdeal: return "lazy_ideal";
    case SchemeKind::Lazy: return "lazy";
    case SchemeKind::Logarithmic: return "logarithmic";
    }
    return "?";
}

VictimPolicyKind parse_victim_policy(const std::string& name) {
    if (name == "greedy") return VictimPolicyKind::Greedy;
    if (name == "lru") return VictimPolicyKind::Lru;
    if (name == "window_greedy") return VictimPolicyKind::WindowGreedy;
    throw ConfigError("unknown victim policy '" + name + "'");
}

const char* to_string(VictimPolicyKind kind) {
    switch (kind) {
    case VictimPolicyKind::Greedy: return "greedy";
    case VictimPolicyKind::Lru: return "lru";
    case VictimPolicyKind::WindowGreedy: return "window_greedy";
    }
    return "?";
}

void FtlConfig::validate() const {
    geometry.validate();
    lsm.validate();
    if (policy.kind == VictimPolicyKind::WindowGreedy && policy.window == 0)
        throw ConfigError("window-greedy needs a window of at least 1");
}

namespace {

// Abundant-RAM baseline and the "all RAM on the cache" variant share their
// validity source: the shadow oracle. They differ only in whether a mapping
// layer exists at all, which the Ftl decides.
class OracleBackedScheme : public GcScheme {
public:
    OracleBackedScheme(Ftl& ftl, VictimPolicy policy, bool ideal)
        : ftl_(ftl), policy_(policy), ideal_(ideal),
          queued_(ftl.nand().geometry().block_count, false) {}

    const char* name() const override { return ideal_ ? "lazy_ideal" : "oracle"; }

    void invalidate(PhysicalAddress) override {}
    void note_internal_page_stale(PhysicalAddress pa) override {
        stale_internal_[pa.block_id] += 1;
    }

    void on_data_block_filled(uint32_t block_id, const std::vector<uint64_t>&) override {
        if (!queued_[block_id]) {
            fill_queue_.push_back(block_id);
            queued_[block_id] = true;
        }
    }

    void on_block_erased(uint32_t block_id, BlockKind) override {
        queued_[block_id] = false;
        stale_internal_.erase(block_id);
    }

    void relocate_internal_pages(uint32_t, BlockKind) override {}

    uint32_t select_victim() override {
        const DeviceGeometry& geo = ftl_.nand().geometry();
        uint32_t best = Ftl::kNoBlock;
        uint32_t best_live = geo.pages_per_block;
        auto live_of = [&](uint32_t b) {
            if (ftl_.nand().block(b).kind() == BlockKind::Data)
                return ftl_.oracle().live_count(b);
            auto it = stale_internal_.find(b);
            uint32_t stale = it == stale_internal_.end() ? 0 : it->second;
            return geo.pages_per_block - stale;
        };
        if (policy_.kind == VictimPolicyKind::Greedy) {
            for (uint32_t b = 0; b < geo.block_count; ++b) {
                if (!ftl_.is_gc_candidate(b)) continue;
                uint32_t live = live_of(b);
                if (live < best_live) {
                    best = b;
                    best_live = live;
                }
            }
            // A fully live argmin means nothing is reclaimable at all.
            if (best == Ftl::kNoBlock)
                throw NoVictim("no reclaimable block");
            return best;
        }
        while (!fill_queue_.empty() && !queued_[fill_queue_.front()])
            fill_queue_.pop_front();
        if (policy_.kind == VictimPolicyKind::Lru) {
            if (!fill_queue_.empty() && ftl_.is_gc_candidate(fill_queue_.front())) {
                best = fill_queue_.front();
                best_live = live_of(best);
                fill_queue_.pop_front();
                queued_[best] = false;
            }
        } else {
            std::size_t seen = 0, best_pos = 0;
            for (std::size_t i = 0; i < fill_queue_.size() && seen < policy_.window; ++i) {
                uint32_t b = fill_queue_[i];
                if (!queued_[b] || !ftl_.is_gc_candidate(b)) continue;
                ++seen;
                if (best == Ftl::kNoBlock || live_of(b) < best_live) {
                    best = b;
                    best_live = live_of(b);
                    best_pos = i;
                }
            }
            if (best != Ftl::kNoBlock) {
                fill_queue_.erase(fill_queue_.begin() + static_cast<std::ptrdiff_t>(best_pos));
                queued_[best] = false;
            }
        }
        // Internal blocks never enter the fill queue; they compete on exact
        // staleness so translation space stays reclaimable.
        uint32_t internal_best = Ftl::kNoBlock;
        uint32_t internal_live = geo.pages_per_block;
        for (uint32_t b = 0; b < geo.block_count; ++b) {
            if (!ftl_.is_gc_candidate(b)) continue;
            if (ftl_.nand().block(b).kind() == BlockKind::Data) continue;
            uint32_t live = live_of(b);
            if (live < internal_live) {
                internal_best = b;
                internal_live = live;
            }
        }
        if (internal_best != Ftl::kNoBlock &&
            (best == Ftl::kNoBlock || internal_live < best_live)) {
            if (best != Ftl::kNoBlock) {
                fill_queue_.push_front(best);
                queued_[best] = true;
            }
            best = internal_best;
        }
        if (best == Ftl::kNoBlock)
            throw NoVictim("no reclaimable block");
        return best;
    }

    std::vector<LivePage> identify_live_pages(uint32_t victim) override {
        return ftl_.oracle().live_set(victim);
    }

private:
    Ftl& ftl_;
    VictimPolicy policy_;
    bool ideal_;
    std::deque<uint32_t> fill_queue_;
    std::vector<bool> queued_;
    std::map<uint32_t, uint32_t> stale_internal_;
};

} // namespace

Ftl::Ftl(const FtlConfig& cfg)
    : cfg_(cfg),
      nand_(cfg.geometry),
      oracle_(cfg.geometry),
      frontier_(6, kNoBlock),
      last_erase_seq_(cfg.geometry.block_count, 0) {
    cfg_.validate();
    switch (cfg_.scheme) {
    case SchemeKind::Oracle:
        scheme_ = std::make_unique<OracleBackedScheme>(*this, cfg_.policy, false);
        ram_map_.assign(cfg_.geometry.logical_pages(), ShadowOracle::kNone);
        break;
    case SchemeKind::LazyIdeal:
        scheme_ = std::make_unique<OracleBackedScheme>(*this, cfg_.policy, true);
        break;
    case SchemeKind::Lazy:
        scheme_ = std::make_unique<LazyGecko>(*this, cfg_.policy);
        break;
    case SchemeKind::Logarithmic:
        scheme_ = std::make_unique<LogGecko>(*this, cfg_.lsm);
        if (auto* log = dynamic_cast<LogGecko*>(scheme_.get()))
            log->lsm().set_cascade_mode(!cfg_.multiway_merge);
        break;
    }
    if (cfg_.scheme != SchemeKind::Oracle) {
        cmt_capacity_ = cfg_.cmt_entries_override
                            ? cfg_.cmt_entries_override
                            : cmt_capacity_for_budget(cfg_.scheme, cfg_.geometry, cfg_.lsm,
                                                      cfg_.ram_budget_bytes);
        mapping_ = std::make_unique<MappingLayer>(*this, cmt_capacity_);
        mapping_->set_lazy_hook_enabled(cfg_.lazy_hook_enabled);
    }
    staged_data_tags_.reserve(cfg_.geometry.pages_per_block);
}

Ftl::~Ftl() = default;

uint32_t Ftl::active_block(BlockKind kind) const {
    return frontier_[static_cast<std::size_t>(kind)];
}

bool Ftl::is_gc_candidate(uint32_t block_id) const {
    const FlashBlock& b = nand_.block(block_id);
    return b.kind() != BlockKind::Free && !nand_.is_frontier(block_id) &&
           nand_.is_full(block_id);
}

PhysicalAddress Ftl::program_on_frontier(BlockKind kind, uint64_t tag, std::any payload,
                                         IoCategory cat) {
    uint32_t& active = frontier_[static_cast<std::size_t>(kind)];
    if (active == kNoBlock || nand_.is_full(active)) {
        active = nand_.allocate_block(kind);
        if (kind == BlockKind::Data) staged_data_tags_.clear();
    }
    PhysicalAddress pa{active, nand_.block(active).write_pointer()};
    nand_.program_page(pa, tag, std::move(payload), cat);
    if (kind == BlockKind::Data) {
        staged_data_tags_.push_back(tag);
        if (nand_.is_full(active)) {
            uint32_t filled = active;
            active = kNoBlock;
            std::vector<uint64_t> tags = std::move(staged_data_tags_);
            staged_data_tags_ = {};
            ++data_block_fills_;
            scheme_->on_data_block_filled(filled, tags);
        }
    } else if (nand_.is_full(active)) {
        active = kNoBlock;
    }
    return pa;
}

void Ftl::note_internal_stale(PhysicalAddress pa) {
    scheme_->note_internal_page_stale(pa);
}

PhysicalAddress Ftl::program_user_page(uint32_t lba) {
    return program_on_frontier(BlockKind::Data, lba, std::any{}, IoCategory::User);
}

void Ftl::write(uint32_t lba) {
    if (lba >= oracle_.logical_pages())
        throw ConfigError("write beyond logical space: lba " + std::to_string(lba));
    ensure_free_space();
    PhysicalAddress pa = program_user_page(lba);
    if (mapping_)
        mapping_->record_write(lba, pa);
    else
        ram_map_[lba] = static_cast<uint32_t>(page_index(cfg_.geometry, pa));
    oracle_.on_write(lba, pa);
    ++user_writes_;
}

void Ftl::read(uint32_t lba) {
    if (lba >= oracle_.logical_pages())
        throw ConfigError("read beyond logical space: lba " + std::to_string(lba));
    std::optional<PhysicalAddress> pa;
    if (mapping_) {
        pa = mapping_->try_lookup(lba);
    } else if (ram_map_[lba] != ShadowOracle::kNone) {
        pa = address_of(cfg_.geometry, ram_map_[lba]);
    }
    // Reads of never-written addresses return zeroes host-side, no flash IO.
    if (pa) nand_.read_page(*pa, IoCategory::User);
}

void Ftl::ensure_free_space() {
    uint32_t threshold = std::max<uint32_t>(4, cfg_.gc_threshold);
    std::size_t guard = 2ull * cfg_.geometry.block_count + 8;
    while (nand_.free_block_count() < threshold) {
        if (guard-- == 0)
            throw OutOfFreeBlocks("garbage collection cannot reclaim space");
        run_gc_once();
    }
}

IoCategory Ftl::erase_category(BlockKind kind) const {
    switch (kind) {
    case BlockKind::Translation: return IoCategory::Translation;
    case BlockKind::Reverse: return IoCategory::Reverse;
    case BlockKind::Gecko: return IoCategory::Lsm;
    case BlockKind::Queue: return IoCategory::Queue;
    default: return IoCategory::GcMigration;
    }
}

void Ftl::run_gc_once() {
    assert(!in_gc_);
    in_gc_ = true;
    IoCounters before = nand_.counters();
    GcRecord rec;
    uint32_t victim = kNoBlock;
    try {
        victim = scheme_->select_victim();
    } catch (...) {
        in_gc_ = false;
        throw;
    }
    rec.victim = victim;
    rec.kind = nand_.block(victim).kind();
    if (rec.kind == BlockKind::Data)
        collect_data_block(victim, rec);
    else
        collect_internal_block(victim, rec.kind);
    erase_and_notify(victim, rec.kind);
    rec.delta = nand_.counters() - before;
    gc_records_.push_back(std::move(rec));
    in_gc_ = false;
}

void Ftl::collect_data_block(uint32_t victim, GcRecord& rec) {
    std::vector<LivePage> live = scheme_->identify_live_pages(victim);
    rec.live_pages = static_cast<uint32_t>(live.size());
    if (auto* log = dynamic_cast<LogGecko*>(scheme_.get()))
        rec.lsm_reads = log->lsm_reads_last_identify();
    if (gc_observer) {
        GcEvent ev{victim, BlockKind::Data, &live};
        gc_observer(ev);
    }
    std::vector<std::pair<uint32_t, PhysicalAddress>> moves;
    moves.reserve(live.size());
    for (const LivePage& lp : live) {
        PhysicalAddress from{victim, lp.page_offset};
        const FlashPage& page = nand_.read_page(from, IoCategory::GcMigration);
        PhysicalAddress to = program_on_frontier(BlockKind::Data, page.tag, page.payload,
                                                 IoCategory::GcMigration);
        oracle_.on_migrate(lp.lba, from, to);
        moves.emplace_back(lp.lba, to);
    }
    if (mapping_) {
        mapping_->record_migration(moves);
    } else {
        for (auto& [lba, to] : moves)
            ram_map_[lba] = static_cast<uint32_t>(page_index(cfg_.geometry, to));
    }
}

void Ftl::collect_internal_block(uint32_t victim, BlockKind kind) {
    if (kind == BlockKind::Translation) {
        assert(mapping_);
        for (uint32_t tp : mapping_->translation_pages_on_block(victim))
            mapping_->migrate_translation_page(tp);
        return;
    }
    scheme_->relocate_internal_pages(victim, kind);
}

void Ftl::erase_and_notify(uint32_t victim, BlockKind former) {
    nand_.erase_block(victim, erase_category(former));
    ++erase_seq_;
    last_erase_seq_[victim] = erase_seq_;
    oracle_.on_erase(victim);
    scheme_->on_block_erased(victim, former);
}

} // namespace gecko
