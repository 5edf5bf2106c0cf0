// shearflow command line: run-torus, run-channel, trace, report, selftest.

#include "shearflow/config.hpp"
#include "shearflow/errors.hpp"
#include "shearflow/orchestrate.hpp"
#include "shearflow/particles.hpp"
#include "shearflow/report.hpp"
#include "shearflow/selftest.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace shearflow;

namespace {

int run_config(const std::string& path, Geometry expected, bool dry_run) {
    const RunConfig cfg = parse_config(path);
    if (cfg.geometry != expected) {
        std::cerr << "error: " << path << " describes a " << to_string(cfg.geometry) << " run; use run-"
                  << to_string(cfg.geometry) << "\n";
        return kExitValidation;
    }
    if (dry_run) {
        std::cout << render_plan(cfg, expand_plan(cfg));
        return kExitOk;
    }
    const OrchestrateResult r = orchestrate(cfg, &std::cerr);
    std::cout << "manifest " << r.manifest.generic_string() << "\n";
    return r.exit_code;
}

struct TraceArgs {
    std::string history;
    std::string points;
    double eps = 0.0;
    double dt = 0.0;
    std::string out = ".";
    std::optional<double> t0;
    std::optional<double> t1;
    int satellites = 4;
    int stride = 1;
};

int run_trace(const TraceArgs& a) {
    const VelocityHistory history = VelocityHistory::from_directory(a.history);
    BundleSpec spec;
    spec.base_points = read_points_csv(a.points);
    spec.eps = a.eps;
    spec.satellites = a.satellites;
    spec.t0 = a.t0.value_or(history.t_begin());
    spec.t1 = a.t1.value_or(history.t_end());
    spec.output_stride = a.stride;
    for (const auto& f : write_trace_outputs(history, spec, a.dt, a.out)) {
        std::cout << "wrote " << f.generic_string() << "\n";
    }
    return kExitOk;
}

int run_report(const std::vector<std::string>& inputs, const std::string& out_dir) {
    for (const auto& in : inputs) {
        const RegularityReport report = RegularityReport::from_csv(read_file(in));
        std::cout << "== " << in << "\n" << render_summary(report);
        if (!out_dir.empty()) {
            fs::path stem = fs::path(in).parent_path().filename();
            if (stem.empty()) stem = "report";
            const fs::path dat = fs::path(out_dir) / (stem.string() + ".dat");
            write_file(dat, to_gnuplot(report));
            std::cout << "wrote " << dat.generic_string() << "\n";
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"shearflow: shear-thinning flow simulator with regularity monitors"};
    app.require_subcommand(1);
    app.set_version_flag("--version", SHEARFLOW_VERSION);

    std::string torus_config;
    bool torus_dry = false;
    auto* torus = app.add_subcommand("run-torus", "run a periodic simulation");
    torus->add_option("--config", torus_config, "configuration file")->required();
    torus->add_flag("--dry-run", torus_dry, "print the run plan and exit");

    std::string channel_config;
    bool channel_dry = false;
    auto* channel = app.add_subcommand("run-channel", "run a channel simulation");
    channel->add_option("--config", channel_config, "configuration file")->required();
    channel->add_flag("--dry-run", channel_dry, "print the run plan and exit");

    TraceArgs targs;
    auto* tr = app.add_subcommand("trace", "trace particles through stored snapshots");
    tr->add_option("--history", targs.history, "directory of SF2D snapshots")->required();
    tr->add_option("--points", targs.points, "CSV of x1,x2 base points")->required();
    tr->add_option("--eps", targs.eps, "satellite distance (0: base points only)")->required();
    tr->add_option("--dt", targs.dt, "RK4 step")->required();
    tr->add_option("--out", targs.out, "output directory");
    tr->add_option("--t0", targs.t0, "start time (default: first snapshot)");
    tr->add_option("--t1", targs.t1, "end time (default: last snapshot)");
    tr->add_option("--satellites", targs.satellites, "satellites per base point");
    tr->add_option("--stride", targs.stride, "record every n-th step");

    std::vector<std::string> report_inputs;
    std::string report_out;
    auto* rep = app.add_subcommand("report", "summarize report.csv files");
    rep->add_option("--input", report_inputs, "report.csv files")->required();
    rep->add_option("--out", report_out, "directory for gnuplot .dat files");

    auto* self = app.add_subcommand("selftest", "run the invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*torus) return run_config(torus_config, Geometry::torus, torus_dry);
        if (*channel) return run_config(channel_config, Geometry::channel, channel_dry);
        if (*tr) return run_trace(targs);
        if (*rep) return run_report(report_inputs, report_out);
        if (*self) return run_selftest(std::cout) == 0 ? kExitOk : kExitNumerical;
    } catch (const ConfigValidationError& e) {
        std::cerr << "invalid configuration:\n";
        for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
        return kExitValidation;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
