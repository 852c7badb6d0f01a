#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "gecko/accounting.hpp"
#include "gecko/ftl.hpp"
#include "gecko/workload.hpp"

namespace gecko {

// Full run configuration. The seed determines the workload completely; two
// runs with the same config produce byte-identical output.
struct SimConfig {
    DeviceGeometry geometry{256, 64, 4096, 0.30, 4}; // desk-scale default
    SchemeKind scheme = SchemeKind::Lazy;
    VictimPolicy policy;
    uint64_t ram_budget_bytes = 64 * 1024;
    LsmConfig lsm;
    uint32_t gc_threshold = 5;
    uint64_t ops = 100000;
    uint64_t seed = 1;
    double warmup_fraction = 0.5; // extra uniform ops before measurement
    bool multiway_merge = true;

    FtlConfig ftl_config() const;
    void validate() const;
};

// Pre-fills the logical space sequentially, runs the unmeasured warmup ops,
// then measures `ops` uniform random writes.
AmplificationReport run_uniform(const SimConfig& cfg);

// Replays a parsed trace (no warmup writes beyond the sequential pre-fill is
// implied; the trace is measured as-is after pre-fill).
AmplificationReport run_trace(const SimConfig& cfg, std::istream& trace);

struct SweepOptions {
    std::vector<SchemeKind> schemes{SchemeKind::LazyIdeal, SchemeKind::Lazy,
                                    SchemeKind::Logarithmic};
    std::vector<uint64_t> budgets; // descending
    int seeds = 1;
    int jobs = 1;
};

// One CSV row per (scheme, budget): metrics averaged over seeds. Budgets a
// scheme cannot satisfy produce an NA row rather than aborting the sweep.
std::string run_ram_sweep(const SimConfig& base, const SweepOptions& opt);

// Budget ladder for the RAM sweep: start at a full in-RAM page map and halve.
std::vector<uint64_t> halving_budgets(const DeviceGeometry& geo, int steps);

} // namespace gecko
