#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gecko/geometry.hpp"
#include "gecko/oracle.hpp"

namespace gecko {

class Ftl;

enum class VictimPolicyKind : uint8_t { Greedy, Lru, WindowGreedy };

struct VictimPolicy {
    VictimPolicyKind kind = VictimPolicyKind::Greedy;
    uint32_t window = 16; // front-of-queue width for window-greedy
};

VictimPolicyKind parse_victim_policy(const std::string& name);
const char* to_string(VictimPolicyKind kind);

// Garbage-collection metadata scheme. The FTL drives it through these hooks;
// the scheme owns victim selection and live-page identification.
class GcScheme {
public:
    virtual ~GcScheme() = default;

    virtual const char* name() const = 0;

    // A data page stopped being current (Algorithm "invalidate", both forms).
    virtual void invalidate(PhysicalAddress pa) = 0;

    // An internal page (translation / reverse / LSM / queue) was superseded.
    // Internal before-images are always known, so this is tracked eagerly.
    virtual void note_internal_page_stale(PhysicalAddress pa) = 0;

    // The active data block just filled; tags holds the logical address
    // written at each offset. (Reverse-map update, queue bookkeeping.)
    virtual void on_data_block_filled(uint32_t block_id, const std::vector<uint64_t>& tags) = 0;

    virtual void on_block_erased(uint32_t block_id, BlockKind former_kind) = 0;

    // Relocate every still-referenced page the scheme keeps on an internal
    // victim (reverse pages, LSM pages, queue pages). Translation pages are
    // the mapping layer's business, not the scheme's.
    virtual void relocate_internal_pages(uint32_t victim, BlockKind kind) = 0;

    // Throws NoVictim when no reclaimable block exists.
    virtual uint32_t select_victim() = 0;

    // Exact live set of the victim, after in-place false-positive resolution.
    virtual std::vector<LivePage> identify_live_pages(uint32_t victim) = 0;
};

} // namespace gecko
