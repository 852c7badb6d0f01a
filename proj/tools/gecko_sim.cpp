#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gecko/accounting.hpp"
#include "gecko/sim.hpp"

namespace {

struct CliOptions {
    gecko::SimConfig sim;
    std::string scheme = "lazy";
    std::string policy = "greedy";
    std::string preset;
    double op_override = -1.0;
};

void add_common_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--preset", o.preset, "device preset: intel525 or micronP420m");
    cmd->add_option("--blocks", o.sim.geometry.block_count, "blocks in the device");
    cmd->add_option("--pages-per-block", o.sim.geometry.pages_per_block, "pages per block");
    cmd->add_option("--page-bytes", o.sim.geometry.page_bytes, "page size in bytes");
    cmd->add_option("--op", o.op_override, "over-provisioning fraction in [0,1)");
    cmd->add_option("--address-bytes", o.sim.geometry.address_bytes, "address size in bytes");
    cmd->add_option("--scheme", o.scheme, "oracle | lazy_ideal | lazy | logarithmic");
    cmd->add_option("--policy", o.policy, "greedy | lru | window_greedy");
    cmd->add_option("--window", o.sim.policy.window, "window-greedy width");
    cmd->add_option("--ram", o.sim.ram_budget_bytes, "RAM budget in bytes");
    cmd->add_option("--size-ratio", o.sim.lsm.size_ratio, "LSM size ratio between levels");
    cmd->add_option("--compression-levels", o.sim.lsm.compression_levels,
                    "LSM levels stored offset-compressed");
    cmd->add_option("--gc-threshold", o.sim.gc_threshold, "free-pool low-water mark");
    cmd->add_option("--ops", o.sim.ops, "measured operations");
    cmd->add_option("--seed", o.sim.seed, "workload seed");
    cmd->add_option("--warmup-frac", o.sim.warmup_fraction,
                    "unmeasured uniform ops as a fraction of --ops");
    cmd->add_flag("--cascade-merge",
                  [&o](std::int64_t) { o.sim.multiway_merge = false; },
                  "use recursive pairwise merging instead of multi-way");
}

void finalize(CliOptions& o, const CLI::App* cmd) {
    if (!o.preset.empty()) {
        gecko::DeviceGeometry geo;
        if (o.preset == "intel525")
            geo = gecko::intel525_geometry();
        else if (o.preset == "micronP420m")
            geo = gecko::micron_p420m_geometry();
        else
            throw gecko::ConfigError("unknown preset '" + o.preset + "'");
        // Explicit dimension flags override the preset.
        if (!cmd->count("--blocks")) o.sim.geometry.block_count = geo.block_count;
        if (!cmd->count("--pages-per-block"))
            o.sim.geometry.pages_per_block = geo.pages_per_block;
        if (!cmd->count("--page-bytes")) o.sim.geometry.page_bytes = geo.page_bytes;
        if (o.op_override < 0) o.op_override = geo.over_provisioning;
    }
    if (o.op_override >= 0) o.sim.geometry.over_provisioning = o.op_override;
    o.sim.scheme = gecko::parse_scheme(o.scheme);
    o.sim.policy.kind = gecko::parse_victim_policy(o.policy);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gecko::SimError("cannot open '" + path + "' for writing");
    out << text;
}

void print_summary(const gecko::SimConfig& cfg, const gecko::AmplificationReport& rep) {
    std::printf("scheme=%s ram=%llu ops=%llu\n", gecko::to_string(cfg.scheme),
                static_cast<unsigned long long>(cfg.ram_budget_bytes),
                static_cast<unsigned long long>(rep.user_writes));
    if (!rep.defined()) {
        std::printf("  WA: N/A (no user writes)\n  RA: N/A\n");
        return;
    }
    std::printf("  WA              %.4f\n", rep.wa());
    std::printf("  RA              %.4f\n", rep.ra());
    std::printf("  WA lsm frac     %.4f\n", rep.wa_fraction(gecko::IoCategory::Lsm));
    std::printf("  WA reverse frac %.4f\n", rep.wa_fraction(gecko::IoCategory::Reverse));
    std::printf("  RA lsm frac     %.4f\n", rep.ra_fraction(gecko::IoCategory::Lsm));
    std::printf("  RA mapping frac %.4f\n", rep.ra_mapping_fraction());
    std::printf("  RA gc frac      %.4f\n", rep.ra_fraction(gecko::IoCategory::GcMigration));
    std::printf("  evictions/write %.4f\n", rep.evictions_per_write());
    std::printf("  erases          %llu\n", static_cast<unsigned long long>(rep.erases()));
}

std::string human_bytes(double v) {
    char buf[64];
    if (v >= 1024.0 * 1024.0)
        std::snprintf(buf, sizeof(buf), "%.1f MB", v / (1024.0 * 1024.0));
    else if (v >= 1024.0)
        std::snprintf(buf, sizeof(buf), "%.1f KB", v / 1024.0);
    else
        std::snprintf(buf, sizeof(buf), "%.0f B", v);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"NAND-flash SSD simulator for flash-resident FTL garbage collection"};
    app.require_subcommand(1);

    CliOptions run_opt, trace_opt, sweep_opt, ram_opt;
    std::string trace_path, csv_path, budgets_arg;
    int halvings = 0, seeds = 1, jobs = 1;
    bool ram_csv = false;

    CLI::App* run_cmd = app.add_subcommand("run", "uniform random write workload");
    add_common_flags(run_cmd, run_opt);
    run_cmd->add_option("--csv", csv_path, "append one CSV data row to this path ('-' = stdout)");

    CLI::App* trace_cmd = app.add_subcommand("trace", "replay a trace file");
    add_common_flags(trace_cmd, trace_opt);
    trace_cmd->add_option("--file", trace_path, "trace file (W,<lba> / R,<lba> lines)")
        ->required();

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "RAM-budget sweep, CSV output");
    add_common_flags(sweep_cmd, sweep_opt);
    std::string sweep_schemes = "lazy_ideal,lazy,logarithmic";
    sweep_cmd->add_option("--schemes", sweep_schemes, "comma-separated scheme list");
    sweep_cmd->add_option("--budgets", budgets_arg, "comma-separated descending byte budgets");
    sweep_cmd->add_option("--halvings", halvings,
                          "generate budgets: full page map halved this many times");
    sweep_cmd->add_option("--seeds", seeds, "seeds per row (metrics averaged)");
    sweep_cmd->add_option("--jobs", jobs, "parallel rows");
    sweep_cmd->add_option("--csv", csv_path, "output path ('-' = stdout)");

    CLI::App* ram_cmd = app.add_subcommand("ram", "RAM-footprint table and IO bounds");
    add_common_flags(ram_cmd, ram_opt);
    ram_cmd->add_flag("--csv-out", ram_csv, "emit the breakdown as CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            finalize(run_opt, run_cmd);
            gecko::AmplificationReport rep = gecko::run_uniform(run_opt.sim);
            print_summary(run_opt.sim, rep);
            if (run_cmd->count("--csv"))
                write_text(csv_path, gecko::csv_header() + "\n" +
                                         gecko::csv_row(gecko::to_string(run_opt.sim.scheme),
                                                        run_opt.sim.ram_budget_bytes, rep) +
                                         "\n");
        } else if (trace_cmd->parsed()) {
            finalize(trace_opt, trace_cmd);
            std::ifstream in(trace_path);
            if (!in) throw gecko::SimError("cannot open trace '" + trace_path + "'");
            gecko::AmplificationReport rep = gecko::run_trace(trace_opt.sim, in);
            print_summary(trace_opt.sim, rep);
        } else if (sweep_cmd->parsed()) {
            finalize(sweep_opt, sweep_cmd);
            gecko::SweepOptions opt;
            opt.seeds = seeds;
            opt.jobs = jobs;
            opt.schemes.clear();
            std::size_t pos = 0;
            while (pos != std::string::npos) {
                std::size_t comma = sweep_schemes.find(',', pos);
                std::string tok = sweep_schemes.substr(
                    pos, comma == std::string::npos ? std::string::npos : comma - pos);
                if (!tok.empty()) opt.schemes.push_back(gecko::parse_scheme(tok));
                pos = comma == std::string::npos ? comma : comma + 1;
            }
            if (!budgets_arg.empty()) {
                std::size_t p = 0;
                while (p != std::string::npos) {
                    std::size_t comma = budgets_arg.find(',', p);
                    std::string tok = budgets_arg.substr(
                        p, comma == std::string::npos ? std::string::npos : comma - p);
                    if (!tok.empty()) opt.budgets.push_back(std::stoull(tok));
                    p = comma == std::string::npos ? comma : comma + 1;
                }
            } else {
                int steps = halvings > 0 ? halvings : 12;
                opt.budgets = gecko::halving_budgets(sweep_opt.sim.geometry, steps);
            }
            write_text(csv_path, gecko::run_ram_sweep(sweep_opt.sim, opt));
        } else if (ram_cmd->parsed()) {
            finalize(ram_opt, ram_cmd);
            gecko::RamBreakdown r =
                gecko::ram_footprint(ram_opt.sim.geometry, ram_opt.sim.lsm);
            gecko::IoOverheadBounds b =
                gecko::io_overhead_bounds(ram_opt.sim.geometry, ram_opt.sim.lsm);
            if (ram_csv) {
                std::printf("structure,bytes\n");
                std::printf("gmd,%.1f\n", r.gmd_bytes);
                std::printf("rmd,%.1f\n", r.rmd_bytes);
                std::printf("pvb,%.1f\n", r.pvb_bytes);
                std::printf("lgmd,%.1f\n", r.lgmd_bytes);
                std::printf("queue_directory,%.1f\n", r.queue_dir_bytes);
                std::printf("cached_bitmaps,%.1f\n", r.cached_bitmap_bytes);
                std::printf("page_buffers,%.1f\n", r.page_buffer_bytes);
                std::printf("lazy_total,%.1f\n", r.lazy_total());
                std::printf("logarithmic_total,%.1f\n", r.logarithmic_total());
                std::printf("ratio,%.4f\n", r.ratio());
            } else {
                std::printf("RAM-resident structures\n");
                std::printf("  GMD              %s\n", human_bytes(r.gmd_bytes).c_str());
                std::printf("  RMD              %s\n", human_bytes(r.rmd_bytes).c_str());
                std::printf("  PVB (lazy)       %s\n", human_bytes(r.pvb_bytes).c_str());
                std::printf("  LGMD             %s\n", human_bytes(r.lgmd_bytes).c_str());
                std::printf("  queue directory  %s\n",
                            human_bytes(r.queue_dir_bytes).c_str());
                std::printf("  cached bitmaps   %s\n",
                            human_bytes(r.cached_bitmap_bytes).c_str());
                std::printf("  page buffers     %s (L=%u)\n",
                            human_bytes(r.page_buffer_bytes).c_str(), r.buffer_levels);
                std::printf("  lazy total       %s\n", human_bytes(r.lazy_total()).c_str());
                std::printf("  logarithmic total %s\n",
                            human_bytes(r.logarithmic_total()).c_str());
                std::printf("  ratio            %.1f%%\n", 100.0 * r.ratio());
                std::printf("IO bounds\n");
                std::printf("  lazy per write   (%g r, %g w)\n", b.lazy_per_write_reads,
                            b.lazy_per_write_writes);
                std::printf("  lazy per GC      (%g r, %g w)\n", b.lazy_per_gc_reads,
                            b.lazy_per_gc_writes);
                std::printf("  log per write    (0 r, %.4f w amortized)\n",
                            b.log_per_write_writes);
                std::printf("  log per GC       (%.2f r, %g w)\n", b.log_per_gc_reads,
                            b.log_per_gc_writes);
            }
        }
    } catch (const gecko::SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
