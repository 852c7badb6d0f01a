#pragma once

#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "gecko/geometry.hpp"

namespace gecko {

class Ftl;
class GcScheme;

// Flash image of one translation page: a dense slice of the logical-to-
// physical map. Entries are packed page indexes; kUnmapped marks addresses
// never written back.
struct TranslationPagePayload {
    static constexpr uint32_t kUnmapped = 0xFFFFFFFFu;
    uint32_t tpage_index = 0;
    std::vector<uint32_t> entries;
};

struct CmtEntry {
    uint32_t lba = 0;
    uint32_t ppa = 0;     // packed page index
    bool dirty = false;
    bool synch = true;    // false: some before-image may be unrecorded in the PVB
    uint64_t insert_seq = 0; // global erase sequence at insertion (see lazy update)
};

// DFTL-style mapping layer: translation pages in flash, a RAM directory of
// their locations (GMD), and an LRU cache of hot entries (CMT). Every
// translation-page read runs the lazy-update pass that resolves validity
// false positives for the active GC scheme.
class MappingLayer {
public:
    MappingLayer(Ftl& ftl, std::size_t capacity_entries);

    // Current physical address of lba. On a cache miss this costs one
    // translation-page read and inserts a clean entry (synch=true).
    // Throws UnmappedLba for never-written addresses.
    PhysicalAddress lookup(uint32_t lba);
    std::optional<PhysicalAddress> try_lookup(uint32_t lba);

    // Mapping half of the write path (Algorithm "Handle Write"): invalidates
    // the cached before-image if present, otherwise inserts with synch=false.
    void record_write(uint32_t lba, PhysicalAddress new_pa);

    // Mapping updates for GC-migrated pages. Cached lbas are updated in place
    // (dirty); uncached lbas are written straight to their translation pages,
    // batched one read-modify-write per page.
    void record_migration(const std::vector<std::pair<uint32_t, PhysicalAddress>>& moves);

    // Evicts the least recently used entry. A dirty eviction reads, updates
    // and rewrites the translation page; all other dirty entries of the same
    // page are written back and marked clean in the same operation.
    void evict_lru();

    // Relocate a still-live translation page during GC of a translation
    // block. The read fires the lazy-update pass.
    void migrate_translation_page(uint32_t tpage_index);

    // Non-disturbing cache probe (no LRU movement).
    const CmtEntry* probe(uint32_t lba) const;

    std::size_t size() const { return lru_.size(); }
    std::size_t capacity() const { return capacity_; }
    uint64_t evictions() const { return evictions_clean_ + evictions_dirty_; }
    uint64_t dirty_evictions() const { return evictions_dirty_; }

    std::optional<PhysicalAddress> translation_page_location(uint32_t tpage_index) const;
    std::vector<uint32_t> translation_pages_on_block(uint32_t block_id) const;

    // Flash-side mapping entry, bypassing the cache. Uncounted; used by
    // invariant checks and tests.
    std::optional<PhysicalAddress> peek_flash_entry(uint32_t lba) const;

    // Diagnostic switch: with the hook disabled, false positives accumulate
    // until GC resolves them.
    void set_lazy_hook_enabled(bool on) { lazy_hook_enabled_ = on; }

private:
    using LruList = std::list<CmtEntry>;

    const TranslationPagePayload& read_translation_page(PhysicalAddress pa, IoCategory cat);
    void apply_lazy_update(const TranslationPagePayload& page);
    void write_back_translation_page(uint32_t tpage_index);
    void insert_entry(CmtEntry entry, bool cold = false);
    void remove_entry(LruList::iterator it);
    uint32_t tpage_of(uint32_t lba) const { return lba / entries_per_page_; }

    Ftl& ftl_;
    std::size_t capacity_;
    uint32_t entries_per_page_;
    std::vector<std::optional<PhysicalAddress>> gmd_;
    LruList lru_; // front = most recently used
    std::unordered_map<uint32_t, LruList::iterator> index_;
    std::unordered_map<uint32_t, std::set<uint32_t>> resident_by_tpage_;
    uint64_t evictions_clean_ = 0;
    uint64_t evictions_dirty_ = 0;
    bool lazy_hook_enabled_ = true;
};

} // namespace gecko
