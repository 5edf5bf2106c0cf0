#include "shearflow/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace shearflow {

ConfigSyntaxError::ConfigSyntaxError(int line, const std::string& what)
    : InvalidInput("config syntax error at line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::string out = "invalid config (" + std::to_string(v.size()) + " problem" + (v.size() == 1 ? "" : "s") + "):";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
}

} // namespace

ConfigValidationError::ConfigValidationError(std::vector<std::string> violations)
    : InvalidInput(join_violations(violations)), violations_(std::move(violations)) {}

// ---------------------------------------------------------------------------
// TOML subset parser

namespace {

class TomlParser {
public:
    explicit TomlParser(const std::string& text) : s_(text) {}

    TomlTable parse() {
        TomlTable table;
        std::string section;
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                ++pos_;
                if (!eof() && peek() == '[') fail("arrays of tables are not supported");
                const std::size_t start = pos_;
                while (!eof() && peek() != ']' && peek() != '\n') ++pos_;
                if (eof() || peek() != ']') fail("unterminated section header");
                section = trim(s_.substr(start, pos_ - start));
                ++pos_;
                if (section.empty()) fail("empty section name");
                for (char c : section) {
                    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
                        fail("invalid character in section name '" + section + "'");
                    }
                }
                end_of_line();
                continue;
            }
            const int key_line = line_;
            const std::string key = bare_key();
            skip_spaces();
            if (eof() || peek() != '=') fail("expected '=' after key '" + key + "'");
            ++pos_;
            skip_spaces();
            TomlValue v = value();
            v.line = key_line;
            const std::string full = section.empty() ? key : section + "." + key;
            if (table.count(full)) fail("duplicate key '" + full + "'");
            table.emplace(full, std::move(v));
            end_of_line();
        }
        return table;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;

    [[noreturn]] void fail(const std::string& what) const { throw ConfigSyntaxError(line_, what); }
    [[nodiscard]] bool eof() const { return pos_ >= s_.size(); }
    [[nodiscard]] char peek() const { return s_[pos_]; }

    static std::string trim(const std::string& x) {
        const auto b = x.find_first_not_of(" \t");
        if (b == std::string::npos) return "";
        const auto e = x.find_last_not_of(" \t");
        return x.substr(b, e - b + 1);
    }

    void skip_spaces() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
    }

    void skip_comment() {
        if (!eof() && peek() == '#') {
            while (!eof() && peek() != '\n') ++pos_;
        }
    }

    void skip_blank_lines() {
        while (true) {
            skip_spaces();
            skip_comment();
            if (!eof() && peek() == '\n') {
                ++pos_;
                ++line_;
                continue;
            }
            return;
        }
    }

    /// Whitespace, comments and newlines inside arrays.
    void skip_array_space() {
        while (true) {
            skip_spaces();
            skip_comment();
            if (!eof() && peek() == '\n') {
                ++pos_;
                ++line_;
                continue;
            }
            return;
        }
    }

    void end_of_line() {
        skip_spaces();
        skip_comment();
        if (eof()) return;
        if (peek() != '\n') fail(std::string("unexpected character '") + peek() + "'");
        ++pos_;
        ++line_;
    }

    std::string bare_key() {
        const std::size_t start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
        if (pos_ == start) fail(std::string("expected a key, found '") + (eof() ? ' ' : peek()) + "'");
        return s_.substr(start, pos_ - start);
    }

    TomlValue value() {
        if (eof() || peek() == '\n') fail("missing value");
        TomlValue v;
        v.line = line_;
        const char c = peek();
        if (c == '"') {
            v.value = string_value();
        } else if (c == '[') {
            v.value = array_value();
        } else if (s_.compare(pos_, 4, "true") == 0) {
            pos_ += 4;
            v.value = true;
        } else if (s_.compare(pos_, 5, "false") == 0) {
            pos_ += 5;
            v.value = false;
        } else {
            const std::size_t start = pos_;
            while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' || peek() == '+'
                              || peek() == '-' || peek() == '_')) {
                ++pos_;
            }
            std::string token = s_.substr(start, pos_ - start);
            std::erase(token, '_');
            if (token.empty()) fail(std::string("unexpected character '") + c + "'");
            char* end = nullptr;
            const double d = std::strtod(token.c_str(), &end);
            if (end != token.c_str() + token.size() || !std::isfinite(d)) {
                fail("invalid value '" + token + "' (strings must be quoted)");
            }
            v.value = d;
            v.integer = token.find_first_of(".eE") == std::string::npos;
        }
        return v;
    }

    std::string string_value() {
        ++pos_; // opening quote
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            const char c = peek();
            ++pos_;
            if (c == '"') break;
            if (c == '\\') {
                if (eof()) fail("unterminated escape");
                const char e = peek();
                ++pos_;
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(std::string("unknown escape '\\") + e + "'");
                }
            } else {
                out += c;
            }
        }
        return out;
    }

    TomlValue::Array array_value() {
        ++pos_; // [
        TomlValue::Array out;
        while (true) {
            skip_array_space();
            if (eof()) fail("unterminated array");
            if (peek() == ']') {
                ++pos_;
                return out;
            }
            out.push_back(value());
            skip_array_space();
            if (eof()) fail("unterminated array");
            if (peek() == ',') {
                ++pos_;
            } else if (peek() != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }
};

} // namespace

TomlTable parse_toml(const std::string& text) { return TomlParser(text).parse(); }

// ---------------------------------------------------------------------------
// Typed access with collected violations

namespace {

class Reader {
public:
    explicit Reader(TomlTable table) : table_(std::move(table)) {}

    std::vector<std::string> violations;

    bool has(const std::string& key) const { return table_.count(key) > 0; }

    void error(const std::string& key, const std::string& message) {
        const auto it = table_.find(key);
        if (it != table_.end()) {
            violations.push_back(key + " (line " + std::to_string(it->second.line) + "): " + message);
        } else {
            violations.push_back(key + ": " + message);
        }
    }

    const TomlValue* get(const std::string& key) {
        used_.insert(key);
        const auto it = table_.find(key);
        return it == table_.end() ? nullptr : &it->second;
    }

    double number(const std::string& key, double fallback) {
        const TomlValue* v = get(key);
        if (!v) return fallback;
        if (!v->is_number()) {
            error(key, "expected a number");
            return fallback;
        }
        return std::get<double>(v->value);
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) {
            used_.insert(key);
            return std::nullopt;
        }
        return number(key, 0.0);
    }

    long long integer(const std::string& key, long long fallback) {
        const TomlValue* v = get(key);
        if (!v) return fallback;
        if (!v->is_number() || !v->integer) {
            error(key, "expected an integer");
            return fallback;
        }
        return static_cast<long long>(std::get<double>(v->value));
    }

    bool boolean(const std::string& key, bool fallback) {
        const TomlValue* v = get(key);
        if (!v) return fallback;
        if (!v->is_bool()) {
            error(key, "expected true or false");
            return fallback;
        }
        return std::get<bool>(v->value);
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const TomlValue* v = get(key);
        if (!v) return fallback;
        if (!v->is_string()) {
            error(key, "expected a quoted string");
            return fallback;
        }
        return std::get<std::string>(v->value);
    }

    std::vector<double> numbers(const std::string& key) {
        const TomlValue* v = get(key);
        if (!v) return {};
        std::vector<double> out;
        if (!v->is_array()) {
            error(key, "expected an array of numbers");
            return out;
        }
        for (const auto& e : std::get<TomlValue::Array>(v->value)) {
            if (!e.is_number()) {
                error(key, "expected an array of numbers");
                return {};
            }
            out.push_back(std::get<double>(e.value));
        }
        return out;
    }

    std::vector<std::vector<double>> rows(const std::string& key) {
        const TomlValue* v = get(key);
        if (!v) return {};
        std::vector<std::vector<double>> out;
        if (!v->is_array()) {
            error(key, "expected an array of arrays");
            return out;
        }
        for (const auto& row : std::get<TomlValue::Array>(v->value)) {
            if (!row.is_array()) {
                error(key, "expected an array of arrays");
                return {};
            }
            std::vector<double> r;
            for (const auto& e : std::get<TomlValue::Array>(row.value)) {
                if (!e.is_number()) {
                    error(key, "expected numbers");
                    return {};
                }
                r.push_back(std::get<double>(e.value));
            }
            out.push_back(std::move(r));
        }
        return out;
    }

    void report_unknown() {
        for (const auto& [key, v] : table_) {
            if (!used_.count(key)) {
                violations.push_back(key + " (line " + std::to_string(v.line) + "): unknown key");
            }
        }
    }

private:
    TomlTable table_;
    std::set<std::string> used_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::vector<FourierModeSpec> read_modes(Reader& r, const std::string& key) {
    std::vector<FourierModeSpec> out;
    for (const auto& row : r.rows(key)) {
        if (row.size() != 6) {
            r.error(key, "each mode is [k1, k2, sin_u1, sin_u2, cos_u1, cos_u2]");
            return {};
        }
        if (row[0] != std::round(row[0]) || row[1] != std::round(row[1])) {
            r.error(key, "wavenumbers must be integers");
            return {};
        }
        FourierModeSpec m;
        m.k1 = static_cast<int>(row[0]);
        m.k2 = static_cast<int>(row[1]);
        m.sin_amp = {row[2], row[3]};
        m.cos_amp = {row[4], row[5]};
        out.push_back(m);
    }
    return out;
}

void check_snapshot(Reader& r, const std::string& key, const std::filesystem::path& path, Geometry geometry) {
    if (!std::filesystem::exists(path)) {
        r.error(key, "file not found: " + path.string());
        return;
    }
    try {
        const SnapshotData s = read_snapshot(path);
        if (s.geometry != geometry) {
            r.error(key, "snapshot geometry is " + to_string(s.geometry) + ", expected " + to_string(geometry));
        }
    } catch (const Error& e) {
        r.error(key, e.what());
    }
}

} // namespace

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    Reader r(parse_toml(text));
    RunConfig cfg;
    cfg.source_text = text;

    const std::string geometry = r.string("run.geometry", "torus");
    if (geometry == "torus") {
        cfg.geometry = Geometry::torus;
    } else if (geometry == "channel") {
        cfg.geometry = Geometry::channel;
    } else {
        r.error("run.geometry", "expected \"torus\" or \"channel\"");
    }
    const bool channel = cfg.geometry == Geometry::channel;
    const long long seed = r.integer("run.seed", 0);
    if (seed < 0) r.error("run.seed", "must be >= 0");
    cfg.solver.seed = static_cast<std::uint64_t>(std::max(0LL, seed));

    // [params]
    cfg.params.p = r.number("params.p", 2.0);
    cfg.params.delta = r.number("params.delta", 0.0);
    cfg.params.nu0 = r.number("params.nu0", 0.01);
    cfg.params.nu1 = r.number("params.nu1", 0.0);
    if (!(cfg.params.p > 1.0 && cfg.params.p <= 2.0)) r.error("params.p", "must lie in (1, 2]");
    if (channel && !(cfg.params.p >= 1.5)) {
        r.error("params.p", "channel runs require p >= 3/2 (the normal-derivative recovery divides by alpha1, "
                            "which is bounded below only for p in [3/2, 2])");
    }
    if (!(cfg.params.delta >= 0.0)) r.error("params.delta", "must be >= 0");
    if (!(cfg.params.nu0 >= 0.0)) r.error("params.nu0", "must be >= 0");
    if (!(cfg.params.nu1 >= 0.0)) r.error("params.nu1", "must be >= 0");
    if (channel && !(cfg.params.nu0 > 0.0)) r.error("params.nu0", "channel runs require nu0 > 0");

    // [grid]
    if (channel) {
        cfg.n1 = static_cast<int>(r.integer("grid.n1", 32));
        cfg.n2 = static_cast<int>(r.integer("grid.n2", 32));
        if (cfg.n1 < 4 || cfg.n1 % 2 != 0) r.error("grid.n1", "must be even and >= 4");
        if (cfg.n2 < 4) r.error("grid.n2", "must be >= 4");
        const std::string x2 = r.string("grid.x2", "uniform");
        if (x2 == "chebyshev") {
            r.error("grid.x2", "the Chebyshev-Gauss-Lobatto x2 grid is not implemented; use \"uniform\"");
        } else if (x2 != "uniform") {
            r.error("grid.x2", "expected \"uniform\"");
        }
        if (r.has("grid.n")) r.error("grid.n", "channel grids use n1 and n2");
        r.get("grid.n");
    } else {
        cfg.n1 = static_cast<int>(r.integer("grid.n", 32));
        cfg.n2 = cfg.n1;
        if (cfg.n1 < 4 || cfg.n1 % 2 != 0) r.error("grid.n", "must be even and >= 4");
        for (const char* k : {"grid.n1", "grid.n2", "grid.x2"}) {
            if (r.has(k)) r.error(k, "only valid for channel runs");
            r.get(k);
        }
    }

    // [time]
    cfg.solver.dt = r.number("time.dt", 1e-3);
    cfg.solver.T = r.number("time.T", 1.0);
    if (!(cfg.solver.dt > 0.0)) r.error("time.dt", "must be > 0");
    if (!(cfg.solver.T >= 0.0)) r.error("time.T", "must be >= 0");
    const std::string scheme = r.string("time.scheme", "imex-cn-ab2");
    try {
        cfg.solver.scheme = parse_time_scheme(scheme);
    } catch (const InvalidInput&) {
        r.error("time.scheme", "expected imex-cn-ab2, imex-euler or rk3-fully-explicit");
    }
    if (cfg.params.nu0 == 0.0 && cfg.solver.scheme != TimeScheme::rk3_explicit && !channel) {
        r.error("time.scheme", "nu0 = 0 requires rk3-fully-explicit");
    }
    if (channel && cfg.solver.scheme == TimeScheme::rk3_explicit) {
        r.error("time.scheme", "rk3-fully-explicit is not available on the channel");
    }
    const std::string diffusion = r.string("time.diffusion", "integrating-factor");
    if (diffusion == "integrating-factor") {
        cfg.solver.diffusion = DiffusionMode::integrating_factor;
    } else if (diffusion == "crank-nicolson") {
        cfg.solver.diffusion = DiffusionMode::crank_nicolson;
    } else {
        r.error("time.diffusion", "expected \"integrating-factor\" or \"crank-nicolson\"");
    }
    cfg.solver.stabilization = r.optional_number("time.stabilization");
    if (cfg.solver.stabilization && !(*cfg.solver.stabilization >= 0.0)) r.error("time.stabilization", "must be >= 0");
    cfg.solver.cfl_limit = r.number("time.cfl_limit", 1.0);
    if (!(cfg.solver.cfl_limit > 0.0)) r.error("time.cfl_limit", "must be > 0");

    // [initial]
    const std::string kind = r.string("initial.kind", "zero");
    const double amplitude = r.number("initial.amplitude", 1.0);
    const long long wavenumber = r.integer("initial.wavenumber", 1);
    const double alpha = r.number("initial.alpha", 1.1);
    const auto modes = read_modes(r, "initial.modes");
    const std::string init_path = r.string("initial.path", "");
    if (channel) {
        auto& ci = cfg.channel_initial;
        ci.amplitude = amplitude;
        ci.wavenumber = static_cast<int>(wavenumber);
        if (kind == "zero") ci.kind = ChannelInitialSpec::Kind::zero;
        else if (kind == "poiseuille") ci.kind = ChannelInitialSpec::Kind::poiseuille;
        else if (kind == "stokes-mode") ci.kind = ChannelInitialSpec::Kind::stokes_mode;
        else if (kind == "stream") ci.kind = ChannelInitialSpec::Kind::stream;
        else if (kind == "snapshot") ci.kind = ChannelInitialSpec::Kind::snapshot;
        else r.error("initial.kind", "channel initial data: zero, poiseuille, stokes-mode, stream or snapshot");
        if (ci.kind == ChannelInitialSpec::Kind::snapshot) {
            ci.path = resolve(base_dir, init_path).string();
            if (init_path.empty()) r.error("initial.path", "required for kind = \"snapshot\"");
            else check_snapshot(r, "initial.path", ci.path, Geometry::channel);
        }
        if (!modes.empty()) r.error("initial.modes", "only valid for torus runs");
    } else {
        auto& ti = cfg.torus_initial;
        ti.amplitude = amplitude;
        ti.wavenumber = static_cast<int>(wavenumber);
        ti.alpha = alpha;
        ti.modes = modes;
        if (kind == "zero") ti.kind = TorusInitialSpec::Kind::zero;
        else if (kind == "taylor-green") ti.kind = TorusInitialSpec::Kind::taylor_green;
        else if (kind == "shear") ti.kind = TorusInitialSpec::Kind::shear;
        else if (kind == "modes") ti.kind = TorusInitialSpec::Kind::modes;
        else if (kind == "spectrum") ti.kind = TorusInitialSpec::Kind::spectrum;
        else if (kind == "snapshot") ti.kind = TorusInitialSpec::Kind::snapshot;
        else r.error("initial.kind", "torus initial data: zero, taylor-green, shear, modes, spectrum or snapshot");
        if (ti.kind == TorusInitialSpec::Kind::modes && modes.empty()) {
            r.error("initial.modes", "required for kind = \"modes\"");
        }
        if (ti.kind == TorusInitialSpec::Kind::spectrum && !(alpha > 0.0)) r.error("initial.alpha", "must be > 0");
        if (ti.kind == TorusInitialSpec::Kind::snapshot) {
            ti.path = resolve(base_dir, init_path).string();
            if (init_path.empty()) r.error("initial.path", "required for kind = \"snapshot\"");
            else check_snapshot(r, "initial.path", ti.path, Geometry::torus);
        }
    }

    // [forcing]
    const std::string fkind = r.string("forcing.kind", "zero");
    auto& f = cfg.forcing;
    const auto value = r.numbers("forcing.value");
    f.modes = read_modes(r, "forcing.modes");
    f.amplitude = r.number("forcing.amplitude", 1.0);
    f.frequency = r.number("forcing.frequency", 0.0);
    const std::string fpath = r.string("forcing.path", "");
    if (fkind == "zero") {
        f.kind = ForcingSpec::Kind::zero;
    } else if (fkind == "constant") {
        f.kind = ForcingSpec::Kind::constant;
        if (value.size() != 2) r.error("forcing.value", "expected [f1, f2]");
        else f.value = {value[0], value[1]};
    } else if (fkind == "modes") {
        f.kind = ForcingSpec::Kind::modes;
        if (channel) r.error("forcing.kind", "modal forcing is only available on the torus");
        if (f.modes.empty()) r.error("forcing.modes", "required for kind = \"modes\"");
    } else if (fkind == "file") {
        f.kind = ForcingSpec::Kind::file;
        f.path = resolve(base_dir, fpath);
        if (fpath.empty()) r.error("forcing.path", "required for kind = \"file\"");
        else check_snapshot(r, "forcing.path", f.path, cfg.geometry);
    } else {
        r.error("forcing.kind", "expected zero, constant, modes or file");
    }

    // [output]
    cfg.output.dir = resolve(base_dir, r.string("output.dir", "out"));
    cfg.output.write_snapshots = r.boolean("output.write_snapshots", true);
    cfg.solver.snapshot_stride = static_cast<int>(r.integer("output.snapshot_stride", 0));
    cfg.solver.monitor_stride = static_cast<int>(r.integer("output.monitor_stride", 1));
    if (cfg.solver.snapshot_stride < 0) r.error("output.snapshot_stride", "must be >= 0");
    if (cfg.solver.monitor_stride < 1) r.error("output.monitor_stride", "must be >= 1");

    // [ladder]
    if (r.has("ladder.resolutions")) {
        LadderSpec l;
        for (double v : r.numbers("ladder.resolutions")) {
            if (v != std::round(v) || v < 4 || static_cast<long long>(v) % 2 != 0) {
                r.error("ladder.resolutions", "entries must be even integers >= 4");
                break;
            }
            l.resolutions.push_back(static_cast<int>(v));
        }
        for (std::size_t i = 1; i < l.resolutions.size(); ++i) {
            if (l.resolutions[i] <= l.resolutions[i - 1]) {
                r.error("ladder.resolutions", "must be strictly increasing");
                break;
            }
        }
        if (l.resolutions.empty()) r.error("ladder.resolutions", "must not be empty");
        l.parallel = r.boolean("ladder.parallel", false);
        l.diffusive_dt = r.boolean("ladder.diffusive_dt", false);
        l.p_exponent = r.number("ladder.p_exponent", 2.0);
        if (!(l.p_exponent > 1.0)) r.error("ladder.p_exponent", "must be > 1");
        l.thresholds.stable_change = r.number("ladder.stable_change", 0.05);
        l.thresholds.divergent_growth = r.number("ladder.divergent_growth", 0.5);
        if (!(l.thresholds.stable_change > 0.0 && l.thresholds.stable_change < l.thresholds.divergent_growth)) {
            r.error("ladder.stable_change", "need 0 < stable_change < divergent_growth");
        }
        cfg.ladder = l;
    } else {
        for (const char* k : {"ladder.parallel", "ladder.diffusive_dt", "ladder.p_exponent", "ladder.stable_change",
                              "ladder.divergent_growth"}) {
            if (r.has(k)) r.error(k, "requires ladder.resolutions");
            r.get(k);
        }
    }

    // [trace]
    if (r.has("trace.points") || r.has("trace.points_file")) {
        TraceSpec t;
        for (const auto& row : r.rows("trace.points")) {
            if (row.size() != 2) {
                r.error("trace.points", "each point is [x1, x2]");
                break;
            }
            t.points.push_back({row[0], row[1]});
        }
        const std::string pfile = r.string("trace.points_file", "");
        if (!pfile.empty()) {
            const auto path = resolve(base_dir, pfile);
            if (!std::filesystem::exists(path)) {
                r.error("trace.points_file", "file not found: " + path.string());
            } else {
                try {
                    const auto more = read_points_csv(path);
                    t.points.insert(t.points.end(), more.begin(), more.end());
                } catch (const Error& e) {
                    r.error("trace.points_file", e.what());
                }
            }
        }
        t.eps = r.number("trace.eps", 0.0);
        t.satellites = static_cast<int>(r.integer("trace.satellites", 4));
        t.dt = r.number("trace.dt", cfg.solver.dt);
        t.output_stride = static_cast<int>(r.integer("trace.output_stride", 1));
        if (!(t.eps >= 0.0)) r.error("trace.eps", "must be >= 0");
        if (t.satellites < 1) r.error("trace.satellites", "must be >= 1");
        if (!(t.dt > 0.0)) r.error("trace.dt", "must be > 0");
        if (t.output_stride < 1) r.error("trace.output_stride", "must be >= 1");
        if (channel) {
            for (const auto& p : t.points) {
                if (std::abs(p[1]) > 1.0) {
                    r.error("trace.points", "channel points need |x2| <= 1");
                    break;
                }
            }
        }
        const double spacing = cfg.solver.dt * std::max(1, cfg.solver.snapshot_stride);
        if (t.dt > spacing * (1.0 + 1e-12)) {
            r.error("trace.dt", "must not exceed the snapshot spacing dt * snapshot_stride");
        }
        cfg.trace = t;
    } else {
        for (const char* k : {"trace.eps", "trace.satellites", "trace.dt", "trace.output_stride"}) {
            if (r.has(k)) r.error(k, "requires trace.points or trace.points_file");
            r.get(k);
        }
    }

    r.report_unknown();
    if (!r.violations.empty()) {
        throw ConfigValidationError(std::move(r.violations));
    }
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInput("cannot read config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

// ---------------------------------------------------------------------------

std::vector<PlannedRun> expand_plan(const RunConfig& config) {
    std::vector<PlannedRun> plan;
    if (!config.ladder) {
        plan.push_back({0, config.n1, config.n2, config.solver.dt, config.solver.seed, config.output.dir});
        return plan;
    }
    const auto& res = config.ladder->resolutions;
    for (std::size_t i = 0; i < res.size(); ++i) {
        PlannedRun r;
        r.index = static_cast<int>(i);
        if (config.geometry == Geometry::torus) {
            r.n1 = r.n2 = res[i];
        } else {
            // Keep the configured aspect n1 : n2.
            r.n2 = res[i];
            r.n1 = std::max(4, 2 * static_cast<int>(std::lround(0.5 * res[i] * config.n1 / static_cast<double>(config.n2))));
        }
        r.dt = config.solver.dt;
        if (config.ladder->diffusive_dt) {
            const double ratio = static_cast<double>(res.front()) / res[i];
            r.dt = config.solver.dt * ratio * ratio;
        }
        r.seed = config.solver.seed;
        r.dir = config.output.dir / ("n" + std::to_string(res[i]));
        plan.push_back(r);
    }
    return plan;
}

std::string render_plan(const RunConfig& config, const std::vector<PlannedRun>& plan) {
    std::ostringstream out;
    out << "geometry " << to_string(config.geometry) << "\n";
    out << "runs " << plan.size() << "\n";
    for (const auto& r : plan) {
        char line[256];
        std::snprintf(line, sizeof line, "run %d n1=%d n2=%d dt=%.17g T=%.17g seed=%llu dir=%s\n", r.index, r.n1, r.n2,
                      r.dt, config.solver.T, static_cast<unsigned long long>(r.seed),
                      (config.output.dir.filename() / r.dir.lexically_relative(config.output.dir)).lexically_normal().generic_string().c_str());
        out << line;
    }
    return out.str();
}

std::vector<Point> read_points_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot read points file " + path.string());
    std::vector<Point> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a = 0.0, b = 0.0;
        if (!(ss >> a >> b)) {
            if (out.empty() && number == 1) continue; // header
            throw InvalidInput(path.string() + ":" + std::to_string(number) + ": expected x1,x2");
        }
        out.push_back({a, b});
    }
    return out;
}

} // namespace shearflow
