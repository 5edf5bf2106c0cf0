#include "shearflow/orchestrate.hpp"

#include "shearflow/errors.hpp"
#include "shearflow/parallel.hpp"

#include "json.hpp"
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace shearflow {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Files and hashes

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInput("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InvalidInput("cannot write " + path.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw InvalidInput("write failed for " + path.string());
    }
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void log_line(std::ostream* log, const std::string& line) {
    if (log != nullptr) {
        *log << line << '\n';
    }
}

SnapshotData to_snapshot(double t, const TorusField& u) {
    SnapshotData s;
    s.geometry = Geometry::torus;
    s.n1 = s.n2 = static_cast<std::uint32_t>(u.resolution());
    s.time = t;
    s.u1 = u.grid(0);
    s.u2 = u.grid(1);
    return s;
}

SnapshotData to_snapshot(double t, const ChannelField& u) {
    SnapshotData s;
    s.geometry = Geometry::channel;
    s.n1 = static_cast<std::uint32_t>(u.n1());
    s.n2 = static_cast<std::uint32_t>(u.n2());
    s.time = t;
    s.u1 = u.nodes(0);
    s.u2 = u.nodes(1);
    return s;
}

std::array<double, 2> mode_sum(const std::vector<FourierModeSpec>& modes, double x1, double x2) {
    std::array<double, 2> v{0.0, 0.0};
    for (const auto& m : modes) {
        const double phase = m.k1 * x1 + m.k2 * x2;
        for (std::size_t c = 0; c < 2; ++c) {
            v[c] += m.sin_amp[c] * std::sin(phase) + m.cos_amp[c] * std::cos(phase);
        }
    }
    return v;
}

TorusForcing torus_forcing(const ForcingSpec& f) {
    switch (f.kind) {
    case ForcingSpec::Kind::zero: return {};
    case ForcingSpec::Kind::constant: {
        // The projection removes a constant force on the torus.
        const auto v = f.value;
        return TorusForcing::analytic([v](double, double, double) { return v; }, false);
    }
    case ForcingSpec::Kind::modes: {
        const auto modes = f.modes;
        const double a = f.amplitude;
        const double w = f.frequency;
        return TorusForcing::analytic(
            [modes, a, w](double x1, double x2, double t) {
                auto v = mode_sum(modes, x1, x2);
                const double s = a * std::cos(w * t);
                return std::array<double, 2>{s * v[0], s * v[1]};
            },
            w != 0.0);
    }
    case ForcingSpec::Kind::file: {
        const SnapshotData snap = read_snapshot(f.path);
        auto field = TorusField::from_grid(static_cast<int>(snap.n1), snap.u1, snap.u2);
        return TorusForcing::steady(f.amplitude * field);
    }
    }
    return {};
}

ChannelForcing channel_forcing(const ForcingSpec& f) {
    switch (f.kind) {
    case ForcingSpec::Kind::zero: return {};
    case ForcingSpec::Kind::constant: return ChannelForcing::constant(f.value[0], f.value[1]);
    case ForcingSpec::Kind::modes: throw InvalidInput("modal forcing is only available on the torus");
    case ForcingSpec::Kind::file: {
        const SnapshotData snap = read_snapshot(f.path);
        auto field = std::make_shared<const ChannelField>(
            ChannelField::from_nodes(static_cast<int>(snap.n1), static_cast<int>(snap.n2), snap.u1, snap.u2));
        const double a = f.amplitude;
        // Evaluated through the interpolant so every ladder level can use it.
        return ChannelForcing::analytic(
            [field, a](double x1, double x2, double) {
                const auto v = field->evaluate(x1, x2);
                return std::array<double, 2>{a * v[0], a * v[1]};
            },
            false);
    }
    }
    return {};
}

struct LevelArtifacts {
    RunOutcome outcome;
    std::vector<fs::path> files;
    std::optional<VelocityHistory> history;
};

template <class Snapshots>
std::vector<fs::path> write_level(const RunConfig& config, const PlannedRun& run, const RegularityReport& report,
                                  const Snapshots& snaps) {
    std::vector<fs::path> files;
    const fs::path report_path = run.dir / "report.csv";
    write_file(report_path, report.to_csv());
    files.push_back(report_path);
    if (config.output.write_snapshots) {
        fs::create_directories(run.dir / "snapshots");
        for (std::size_t i = 0; i < snaps.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "snap_%06zu.sf2d", i);
            const fs::path p = run.dir / "snapshots" / name;
            write_snapshot(p, to_snapshot(snaps[i].t, snaps[i].u));
            files.push_back(p);
        }
    }
    return files;
}

LevelArtifacts run_level(const RunConfig& config, const PlannedRun& run, bool keep_history) {
    LevelArtifacts out;
    out.outcome.plan = run;
    SolverConfig solver = config.solver;
    solver.dt = run.dt;
    solver.seed = run.seed;
    if (config.geometry == Geometry::torus) {
        auto result = run_torus(solver, config.params, config.torus_initial, run.n1, torus_forcing(config.forcing));
        out.outcome.warnings = result.warnings;
        if (result.failure) {
            out.outcome.ok = false;
            out.outcome.failure = *result.failure;
        }
        out.files = write_level(config, run, result.report, result.snapshots);
        if (keep_history && !result.failure && result.snapshots.size() >= 2) {
            out.history = VelocityHistory::from_torus_run(result.snapshots);
        }
        out.outcome.report = std::move(result.report);
    } else {
        auto result = run_channel(solver, config.params, config.channel_initial, run.n1, run.n2,
                                  channel_forcing(config.forcing));
        out.outcome.warnings = result.warnings;
        if (result.alpha1_violations > 0) {
            out.outcome.warnings.push_back("min alpha1 < nu0 at " + std::to_string(result.alpha1_violations) +
                                           " monitored samples");
        }
        if (result.failure) {
            out.outcome.ok = false;
            out.outcome.failure = *result.failure;
        }
        out.files = write_level(config, run, result.report, result.snapshots);
        if (keep_history && !result.failure && result.snapshots.size() >= 2) {
            out.history = VelocityHistory::from_channel_run(result.snapshots);
        }
        out.outcome.report = std::move(result.report);
    }
    return out;
}

json verdict_json(const DashtiRobinsonResult& dr, double p_exponent) {
    json j;
    j["verdict"] = to_string(dr.verdict);
    j["p_exponent"] = p_exponent;
    j["lp_l2_integral"] = dr.lp_l2_integral;
    j["weighted_h2_integral"] = dr.weighted_h2_integral;
    j["lp_change"] = dr.lp_change;
    j["weighted_change"] = dr.weighted_change;
    j["weighted_by_level"] = dr.weighted_by_level;
    return j;
}

std::string relative_to(const fs::path& p, const fs::path& root) {
    return p.lexically_relative(root).generic_string();
}

} // namespace

// ---------------------------------------------------------------------------
// Trace outputs

std::vector<fs::path> write_trace_outputs(const VelocityHistory& history, const BundleSpec& spec, double dt_ode,
                                          const fs::path& dir) {
    const TrajectoryBundle bundle = trace(history, spec, dt_ode);
    std::vector<fs::path> files;

    std::string traj = "t,id,x1,x2,wrapped_x1,wrapped_x2\n";
    for (std::size_t s = 0; s < bundle.times.size(); ++s) {
        for (std::size_t p = 0; p < bundle.paths.size(); ++p) {
            const auto& x = bundle.paths[p][s];
            const auto& w = bundle.wrapped[p][s];
            traj += num(bundle.times[s]) + ',' + std::to_string(p) + ',' + num(x[0]) + ',' + num(x[1]) + ',' +
                    num(w[0]) + ',' + num(w[1]) + '\n';
        }
    }
    write_file(dir / "trajectories.csv", traj);
    files.push_back(dir / "trajectories.csv");

    if (spec.eps > 0.0) {
        const SeparationDiagnostics d = separation_diagnostics(bundle, history);
        std::string diag = "t,max_separation,envelope\n";
        for (std::size_t s = 0; s < d.times.size(); ++s) {
            diag += num(d.times[s]) + ',' + num(d.separation[s]) + ',' + num(d.envelope[s]) + '\n';
        }
        write_file(dir / "diagnostics.csv", diag);
        files.push_back(dir / "diagnostics.csv");
    }
    return files;
}

// ---------------------------------------------------------------------------
// Orchestration

OrchestrateResult orchestrate(const RunConfig& config, std::ostream* log) {
    OrchestrateResult result;
    const auto plan = expand_plan(config);
    const fs::path root = config.output.dir;
    fs::create_directories(root);

    const bool tracing = config.trace.has_value();
    std::vector<LevelArtifacts> levels(plan.size());
    auto run_one = [&](std::size_t i) {
        const bool finest = i + 1 == plan.size();
        log_line(log, "run " + std::to_string(i) + " n1=" + std::to_string(plan[i].n1) +
                          " n2=" + std::to_string(plan[i].n2) + " dt=" + num(plan[i].dt));
        levels[i] = run_level(config, plan[i], tracing && finest);
    };

    if (config.ladder && config.ladder->parallel && plan.size() > 1) {
        // Levels are independent; each keeps its own FFT plans.
        const std::size_t width = std::max<std::size_t>(1, static_cast<std::size_t>(thread_cap()));
        for (std::size_t begin = 0; begin < plan.size(); begin += width) {
            const std::size_t end = std::min(plan.size(), begin + width);
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(end - begin);
            for (std::size_t i = begin; i < end; ++i) {
                pool.emplace_back([&, i] {
                    try {
                        run_one(i);
                    } catch (...) {
                        errors[i - begin] = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) t.join();
            for (auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
        }
    } else {
        for (std::size_t i = 0; i < plan.size(); ++i) run_one(i);
    }

    std::vector<fs::path> files;
    bool all_ok = true;
    for (auto& level : levels) {
        for (const auto& w : level.outcome.warnings) log_line(log, "warning: " + w);
        if (!level.outcome.ok) {
            all_ok = false;
            log_line(log, "failure: " + level.outcome.failure);
        }
        files.insert(files.end(), level.files.begin(), level.files.end());
        result.runs.push_back(level.outcome);
    }

    json manifest;
    manifest["tool"] = "shearflow";
    manifest["version"] = SHEARFLOW_VERSION;
    manifest["geometry"] = to_string(config.geometry);
    manifest["config_sha256"] = sha256_hex(config.source_text);
    manifest["seed"] = config.solver.seed;
    manifest["params"] = {{"p", config.params.p},
                          {"delta", config.params.delta},
                          {"nu0", config.params.nu0},
                          {"nu1", config.params.nu1}};
    manifest["time"] = {{"T", config.solver.T}, {"scheme", to_string(config.solver.scheme)}};

    json runs = json::array();
    for (const auto& r : result.runs) {
        json j;
        j["index"] = r.plan.index;
        j["n1"] = r.plan.n1;
        j["n2"] = r.plan.n2;
        j["dt"] = r.plan.dt;
        j["dir"] = relative_to(r.plan.dir, root).empty() ? "." : relative_to(r.plan.dir, root);
        j["status"] = r.ok ? "ok" : "failed";
        if (!r.ok) j["failure"] = r.failure;
        j["warnings"] = r.warnings;
        j["samples"] = r.report.size();
        runs.push_back(j);
    }
    manifest["runs"] = runs;

    if (config.ladder) {
        if (all_ok) {
            std::vector<RefinementLevel> ladder;
            for (const auto& r : result.runs) ladder.push_back({r.plan.n1, r.report});
            result.dashti_robinson = dashti_robinson_check(ladder, config.ladder->p_exponent, config.ladder->thresholds);
            manifest["dashti_robinson"] = verdict_json(*result.dashti_robinson, config.ladder->p_exponent);
            log_line(log, "dashti_robinson " + to_string(result.dashti_robinson->verdict));
        } else {
            manifest["dashti_robinson"] = {{"verdict", to_string(Verdict::inconclusive)},
                                           {"reason", "a ladder level failed"}};
        }
    }

    if (tracing && levels.back().history) {
        const auto& history = *levels.back().history;
        const auto& t = *config.trace;
        BundleSpec spec;
        spec.base_points = t.points;
        spec.eps = t.eps;
        spec.satellites = t.satellites;
        spec.t0 = history.t_begin();
        spec.t1 = history.t_end();
        spec.output_stride = t.output_stride;
        double dt_ode = t.dt;
        if (dt_ode > history.min_spacing() * (1.0 + 1e-12)) {
            dt_ode = history.min_spacing();
            log_line(log, "warning: trace dt reduced to the snapshot spacing " + num(dt_ode));
        }
        if (spec.t1 > spec.t0) {
            const auto traced = write_trace_outputs(history, spec, dt_ode, root);
            files.insert(files.end(), traced.begin(), traced.end());
        }
    } else if (tracing) {
        manifest["trace"] = {{"status", "skipped"}, {"reason", "finest level produced no usable history"}};
    }

    json outputs = json::array();
    for (const auto& f : files) {
        outputs.push_back(json{{"path", relative_to(f, root)}, {"sha256", sha256_file(f)}, {"bytes", static_cast<std::uint64_t>(fs::file_size(f))}});
    }
    manifest["outputs"] = outputs;
    manifest["status"] = all_ok ? "ok" : "failed";

    result.manifest = root / "manifest.json";
    write_file(result.manifest, manifest.dump(2) + "\n");
    result.exit_code = all_ok ? kExitOk : kExitNumerical;
    return result;
}

} // namespace shearflow
