#include "gecko/mapping.hpp"

#include <cassert>

#include "gecko/errors.hpp"
#include "gecko/ftl.hpp"

namespace gecko {

MappingLayer::MappingLayer(Ftl& ftl, std::size_t capacity_entries)
    : ftl_(ftl),
      capacity_(capacity_entries),
      entries_per_page_(ftl.nand().geometry().entries_per_translation_page()),
      gmd_(ftl.nand().geometry().translation_page_count()) {
    if (capacity_ == 0)
        throw InsufficientRam("mapping cache needs room for at least one entry");
}

const TranslationPagePayload& MappingLayer::read_translation_page(PhysicalAddress pa,
                                                                  IoCategory cat) {
    const FlashPage& page = ftl_.nand().read_page(pa, cat);
    const auto& payload = std::any_cast<const TranslationPagePayload&>(page.payload);
    if (lazy_hook_enabled_)
        apply_lazy_update(payload);
    return payload;
}

// Lazy-update pass: every cached, unsynchronized entry covered by this page
// gets its flash-recorded before-image invalidated, unless that address has
// been recycled by an erase since the entry was cached, or is the entry's own
// current page.
void MappingLayer::apply_lazy_update(const TranslationPagePayload& page) {
    auto resident = resident_by_tpage_.find(page.tpage_index);
    if (resident == resident_by_tpage_.end()) return;
    uint64_t base = static_cast<uint64_t>(page.tpage_index) * entries_per_page_;
    for (uint32_t lba : resident->second) {
        CmtEntry& e = *index_.at(lba);
        if (e.synch) continue;
        uint32_t packed = page.entries[lba - base];
        if (packed != TranslationPagePayload::kUnmapped && packed != e.ppa) {
            PhysicalAddress pa = address_of(ftl_.nand().geometry(), packed);
            if (ftl_.last_erase_seq(pa.block_id) <= e.insert_seq)
                ftl_.scheme().invalidate(pa);
        }
        e.synch = true;
    }
}

PhysicalAddress MappingLayer::lookup(uint32_t lba) {
    auto hit = index_.find(lba);
    if (hit != index_.end()) {
        lru_.splice(lru_.begin(), lru_, hit->second);
        return address_of(ftl_.nand().geometry(), hit->second->ppa);
    }
    uint32_t tp = tpage_of(lba);
    if (tp >= gmd_.size() || !gmd_[tp])
        throw UnmappedLba("lba " + std::to_string(lba) + " never written");
    const TranslationPagePayload& page = read_translation_page(*gmd_[tp], IoCategory::Translation);
    uint32_t packed = page.entries[lba % entries_per_page_];
    if (packed == TranslationPagePayload::kUnmapped)
        throw UnmappedLba("lba " + std::to_string(lba) + " never written");
    CmtEntry entry;
    entry.lba = lba;
    entry.ppa = packed;
    entry.dirty = false;
    entry.synch = true;
    entry.insert_seq = ftl_.erase_seq();
    insert_entry(entry);
    return address_of(ftl_.nand().geometry(), packed);
}

std::optional<PhysicalAddress> MappingLayer::try_lookup(uint32_t lba) {
    auto hit = index_.find(lba);
    if (hit == index_.end()) {
        uint32_t tp = tpage_of(lba);
        if (tp >= gmd_.size() || !gmd_[tp]) return std::nullopt;
        // Peek at the flash entry first so an unmapped lba costs no IO.
        if (!peek_flash_entry(lba)) return std::nullopt;
    }
    return lookup(lba);
}

void MappingLayer::record_write(uint32_t lba, PhysicalAddress new_pa) {
    uint32_t packed = static_cast<uint32_t>(page_index(ftl_.nand().geometry(), new_pa));
    auto hit = index_.find(lba);
    if (hit != index_.end()) {
        CmtEntry& e = *hit->second;
        // The cached address is the before-image; the synch flag is left
        // alone because an older before-image may still be unrecorded.
        ftl_.scheme().invalidate(address_of(ftl_.nand().geometry(), e.ppa));
        lru_.splice(lru_.begin(), lru_, hit->second);
        e.ppa = packed;
        e.dirty = true;
        return;
    }
    CmtEntry entry;
    entry.lba = lba;
    entry.ppa = packed;
    entry.dirty = true;
    entry.synch = false; // before-image location unknown at write time
    entry.insert_seq = ftl_.erase_seq();
    insert_entry(entry);
}

void MappingLayer::record_migration(
    const std::vector<std::pair<uint32_t, PhysicalAddress>>& moves) {
    const DeviceGeometry& geo = ftl_.nand().geometry();
    // tpage -> (slot lba, new packed address); ordered for determinism
    std::map<uint32_t, std::vector<std::pair<uint32_t, uint32_t>>> uncached;
    for (const auto& [lba, pa] : moves) {
        uint32_t packed = static_cast<uint32_t>(page_index(geo, pa));
        auto hit = index_.find(lba);
        if (hit != index_.end()) {
            // No recency touch: migration is not host access. The old page
            // dies with the victim block, so no invalidate either.
            hit->second->ppa = packed;
            hit->second->dirty = true;
        } else {
            uncached[tpage_of(lba)].emplace_back(lba, packed);
        }
    }
    // Uncached relocations go straight to their translation pages, all lbas
    // sharing a page folded into one read-modify-write.
    for (auto& [tp, slots] : uncached) {
        TranslationPagePayload payload;
        if (gmd_[tp]) {
            payload = read_translation_page(*gmd_[tp], IoCategory::Translation);
        } else {
            payload.tpage_index = tp;
            payload.entries.assign(entries_per_page_, TranslationPagePayload::kUnmapped);
        }
        for (auto& [lba, packed] : slots)
            payload.entries[lba % entries_per_page_] = packed;
        std::optional<PhysicalAddress> old = gmd_[tp];
        PhysicalAddress npa = ftl_.program_on_frontier(BlockKind::Translation, tp,
                                                       std::move(payload),
                                                       IoCategory::Translation);
        if (old) ftl_.note_internal_stale(*old);
        gmd_[tp] = npa;
    }
}

void MappingLayer::evict_lru() {
    assert(!lru_.empty());
    auto victim = std::prev(lru_.end());
    bool was_dirty = victim->dirty;
    if (was_dirty) {
        write_back_translation_page(tpage_of(victim->lba));
        // The write-back cleans every dirty co-resident, the victim included.
        assert(!victim->dirty);
    }
    if (was_dirty) ++evictions_dirty_; else ++evictions_clean_;
    remove_entry(victim);
}

void MappingLayer::write_back_translation_page(uint32_t tpage_index) {
    TranslationPagePayload payload;
    if (gmd_[tpage_index]) {
        // Read-modify-write; the read fires the lazy-update pass, so every
        // entry of this page is synchronized before it leaves the cache.
        payload = read_translation_page(*gmd_[tpage_index], IoCategory::Translation);
    } else {
        payload.tpage_index = tpage_index;
        payload.entries.assign(entries_per_page_, TranslationPagePayload::kUnmapped);
    }
    uint64_t base = static_cast<uint64_t>(tpage_index) * entries_per_page_;
    auto resident = resident_by_tpage_.find(tpage_index);
    if (resident != resident_by_tpage_.end()) {
        for (uint32_t lba : resident->second) {
            CmtEntry& e = *index_.at(lba);
            if (!e.dirty) continue;
            payload.entries[lba - base] = e.ppa;
            e.dirty = false;
        }
    }
    std::optional<PhysicalAddress> old = gmd_[tpage_index];
    PhysicalAddress npa = ftl_.program_on_frontier(BlockKind::Translation, tpage_index,
                                                   std::move(payload), IoCategory::Translation);
    if (old) ftl_.note_internal_stale(*old);
    gmd_[tpage_index] = npa;
}

void MappingLayer::migrate_translation_page(uint32_t tpage_index) {
    assert(gmd_[tpage_index]);
    TranslationPagePayload payload =
        read_translation_page(*gmd_[tpage_index], IoCategory::GcMigration);
    PhysicalAddress old = *gmd_[tpage_index];
    PhysicalAddress npa = ftl_.program_on_frontier(BlockKind::Translation, tpage_index,
                                                   std::move(payload), IoCategory::GcMigration);
    ftl_.note_internal_stale(old);
    gmd_[tpage_index] = npa;
}

const CmtEntry* MappingLayer::probe(uint32_t lba) const {
    auto hit = index_.find(lba);
    return hit == index_.end() ? nullptr : &*hit->second;
}

std::optional<PhysicalAddress> MappingLayer::translation_page_location(
    uint32_t tpage_index) const {
    if (tpage_index >= gmd_.size()) return std::nullopt;
    return gmd_[tpage_index];
}

std::vector<uint32_t> MappingLayer::translation_pages_on_block(uint32_t block_id) const {
    std::vector<uint32_t> out;
    for (uint32_t tp = 0; tp < gmd_.size(); ++tp)
        if (gmd_[tp] && gmd_[tp]->block_id == block_id) out.push_back(tp);
    return out;
}

std::optional<PhysicalAddress> MappingLayer::peek_flash_entry(uint32_t lba) const {
    uint32_t tp = tpage_of(lba);
    if (tp >= gmd_.size() || !gmd_[tp]) return std::nullopt;
    const FlashPage& page = ftl_.nand().peek_page(*gmd_[tp]);
    const auto& payload = std::any_cast<const TranslationPagePayload&>(page.payload);
    uint32_t packed = payload.entries[lba % entries_per_page_];
    if (packed == TranslationPagePayload::kUnmapped) return std::nullopt;
    return address_of(ftl_.nand().geometry(), packed);
}

void MappingLayer::insert_entry(CmtEntry entry, bool cold) {
    if (lru_.size() == capacity_)
        evict_lru();
    // Relocated-by-GC entries are not host accesses; they enter at the cold
    // end so the next write-backs flush them in translation-page batches
    // without displacing hot entries.
    if (cold) {
        lru_.push_back(entry);
        index_[entry.lba] = std::prev(lru_.end());
    } else {
        lru_.push_front(entry);
        index_[entry.lba] = lru_.begin();
    }
    resident_by_tpage_[tpage_of(entry.lba)].insert(entry.lba);
}

void MappingLayer::remove_entry(LruList::iterator it) {
    uint32_t tp = tpage_of(it->lba);
    auto resident = resident_by_tpage_.find(tp);
    resident->second.erase(it->lba);
    if (resident->second.empty()) resident_by_tpage_.erase(resident);
    index_.erase(it->lba);
    lru_.erase(it);
}

} // namespace gecko
