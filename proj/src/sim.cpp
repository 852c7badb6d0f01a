#include "gecko/sim.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <random>

#include "gecko/errors.hpp"

namespace gecko {

FtlConfig SimConfig::ftl_config() const {
    FtlConfig out;
    out.geometry = geometry;
    out.scheme = scheme;
    out.policy = policy;
    out.ram_budget_bytes = ram_budget_bytes;
    out.lsm = lsm;
    out.gc_threshold = gc_threshold;
    out.multiway_merge = multiway_merge;
    return out;
}

void SimConfig::validate() const {
    ftl_config().validate();
    if (warmup_fraction < 0.0)
        throw ConfigError("warmup fraction must be non-negative");
    if (ops == 0)
        throw ConfigError("need at least one operation");
}

namespace {

// Sequential pre-fill so every logical page exists, then the unmeasured
// uniform warmup portion.
void warm_up(Ftl& ftl, std::mt19937_64& rng, const SimConfig& cfg) {
    uint64_t lbas = ftl.oracle().logical_pages();
    for (uint64_t lba = 0; lba < lbas; ++lba)
        ftl.write(static_cast<uint32_t>(lba));
    uint64_t extra = static_cast<uint64_t>(cfg.warmup_fraction * static_cast<double>(cfg.ops));
    for (uint64_t i = 0; i < extra; ++i)
        ftl.write(static_cast<uint32_t>(rng() % lbas));
}

AmplificationReport measure_window(Ftl& ftl, const std::function<void(Ftl&)>& body) {
    IoCounters before = ftl.nand().counters();
    uint64_t writes_before = ftl.user_writes();
    uint64_t evictions_before = ftl.mapping() ? ftl.mapping()->evictions() : 0;
    body(ftl);
    AmplificationReport rep;
    rep.io = ftl.nand().counters() - before;
    rep.user_writes = ftl.user_writes() - writes_before;
    rep.evictions = (ftl.mapping() ? ftl.mapping()->evictions() : 0) - evictions_before;
    return rep;
}

} // namespace

AmplificationReport run_uniform(const SimConfig& cfg) {
    cfg.validate();
    Ftl ftl(cfg.ftl_config());
    std::mt19937_64 rng(cfg.seed);
    warm_up(ftl, rng, cfg);
    uint64_t lbas = ftl.oracle().logical_pages();
    return measure_window(ftl, [&](Ftl& f) {
        for (uint64_t i = 0; i < cfg.ops; ++i)
            f.write(static_cast<uint32_t>(rng() % lbas));
    });
}

AmplificationReport run_trace(const SimConfig& cfg, std::istream& trace) {
    cfg.validate();
    std::vector<TraceRecord> records = parse_trace(trace, cfg.geometry.logical_pages());
    // A trace is a complete workload: replay on a fresh device, measured as-is.
    Ftl ftl(cfg.ftl_config());
    return measure_window(ftl, [&](Ftl& f) {
        for (const TraceRecord& rec : records) {
            if (rec.op == TraceRecord::Op::Write)
                f.write(rec.lba);
            else
                f.read(rec.lba);
        }
    });
}

std::vector<uint64_t> halving_budgets(const DeviceGeometry& geo, int steps) {
    std::vector<uint64_t> out;
    uint64_t budget = geo.logical_pages() * 8; // a full in-RAM page map
    for (int i = 0; i < steps && budget >= 64; ++i) {
        out.push_back(budget);
        budget /= 2;
    }
    return out;
}

namespace {

struct RowMetrics {
    bool defined = false;
    double wa = 0, ra = 0, wa_lsm = 0, wa_reverse = 0;
    double ra_lsm = 0, ra_mapping = 0, ra_gc = 0;
    double evictions_per_write = 0, erases = 0;
};

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string sweep_row(SchemeKind scheme, uint64_t budget, const RowMetrics& m) {
    std::string row = std::string(to_string(scheme)) + "," + std::to_string(budget) + ",";
    if (!m.defined) {
        for (int i = 0; i < 8; ++i) row += "NA,";
        row += "NA";
        return row;
    }
    char erases[64];
    std::snprintf(erases, sizeof(erases), "%.3f", m.erases);
    row += fmt6(m.wa) + "," + fmt6(m.ra) + "," + fmt6(m.wa_lsm) + "," + fmt6(m.wa_reverse) +
           "," + fmt6(m.ra_lsm) + "," + fmt6(m.ra_mapping) + "," + fmt6(m.ra_gc) + "," +
           fmt6(m.evictions_per_write) + "," + erases;
    return row;
}

RowMetrics run_row(const SimConfig& base, SchemeKind scheme, uint64_t budget, int seeds) {
    RowMetrics m;
    int done = 0;
    for (int s = 0; s < seeds; ++s) {
        SimConfig cfg = base;
        cfg.scheme = scheme;
        cfg.ram_budget_bytes = budget;
        cfg.seed = base.seed + static_cast<uint64_t>(s);
        AmplificationReport rep;
        try {
            rep = run_uniform(cfg);
        } catch (const InsufficientRam&) {
            continue; // recorded as an NA row if every seed fails
        }
        m.wa += rep.wa();
        m.ra += rep.ra();
        m.wa_lsm += rep.wa_fraction(IoCategory::Lsm);
        m.wa_reverse += rep.wa_fraction(IoCategory::Reverse);
        m.ra_lsm += rep.ra_fraction(IoCategory::Lsm);
        m.ra_mapping += rep.ra_mapping_fraction();
        m.ra_gc += rep.ra_fraction(IoCategory::GcMigration);
        m.evictions_per_write += rep.evictions_per_write();
        m.erases += static_cast<double>(rep.erases());
        ++done;
    }
    if (done > 0) {
        m.defined = true;
        double n = done;
        m.wa /= n;
        m.ra /= n;
        m.wa_lsm /= n;
        m.wa_reverse /= n;
        m.ra_lsm /= n;
        m.ra_mapping /= n;
        m.ra_gc /= n;
        m.evictions_per_write /= n;
        m.erases /= n;
    }
    return m;
}

} // namespace

std::string run_ram_sweep(const SimConfig& base, const SweepOptions& opt) {
    base.validate();
    if (opt.budgets.empty())
        throw ConfigError("ram sweep needs at least one budget");
    for (std::size_t i = 1; i < opt.budgets.size(); ++i)
        if (opt.budgets[i] > opt.budgets[i - 1])
            throw ConfigError("sweep budgets must be descending");
    if (opt.seeds < 1)
        throw ConfigError("need at least one seed");

    struct Cell {
        SchemeKind scheme;
        uint64_t budget;
    };
    std::vector<Cell> cells;
    for (SchemeKind scheme : opt.schemes)
        for (uint64_t budget : opt.budgets) cells.push_back({scheme, budget});

    std::vector<RowMetrics> rows(cells.size());
    int jobs = std::max(1, opt.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            rows[i] = run_row(base, cells[i].scheme, cells[i].budget, opt.seeds);
    } else {
        // Rows are independent simulator instances; output order stays fixed
        // by the cell list regardless of completion order.
        std::vector<std::future<RowMetrics>> futures(cells.size());
        std::size_t next = 0;
        while (next < cells.size()) {
            std::size_t batch = std::min<std::size_t>(jobs, cells.size() - next);
            for (std::size_t j = 0; j < batch; ++j) {
                const Cell& c = cells[next + j];
                futures[next + j] = std::async(std::launch::async, [&, c] {
                    return run_row(base, c.scheme, c.budget, opt.seeds);
                });
            }
            for (std::size_t j = 0; j < batch; ++j)
                rows[next + j] = futures[next + j].get();
            next += batch;
        }
    }

    std::string csv = csv_header() + "\n";
    for (std::size_t i = 0; i < cells.size(); ++i)
        csv += sweep_row(cells[i].scheme, cells[i].budget, rows[i]) + "\n";
    return csv;
}

} // namespace gecko
