#ifndef CBLB_SCAN_HPP
#define CBLB_SCAN_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cblb/diagnostics.hpp"
#include "cblb/io.hpp"

namespace cblb {

/// Full description of one simulation case: physical parameters, grid,
/// initial data, stop rules, and output cadence.
struct CaseConfig {
    Params params;
    int nx = 32, ny = 32, nz = 32;
    double lx = two_pi, ly = 2.0 * two_pi, lz = two_pi;
    InitSpec init;
    double norm_cap_factor = 100.0;  ///< blowup cap as multiple of initial H2
    int output_every = 1;            ///< steps between diagnostic samples
    std::string source_text;         ///< verbatim config file, echoed in manifests

    Grid grid() const { return Grid(nx, ny, nz, lx, ly, lz); }

    void validate() const {
        if (init.amp_u < 0.0 || init.amp_theta < 0.0)
            throw config_error("init amplitudes must be nonnegative");
        if (params.t_end <= 0.0) throw config_error("t_end must be positive");
        if (params.dt <= 0.0) throw config_error("dt must be positive");
        if (output_every < 1) throw config_error("output.every must be >= 1");
    }
};

struct CaseResult {
    std::string verdict;  ///< stable | bootstrap_violated | norm_blowup | frame_singular
    EnergyReport report;
    double peak_h2 = 0.0;
    double peak_nonzero_l2 = 0.0;
    double decay_rate = 0.0;  ///< fitted rate of the nonzero-mode L2 decay
    bool decay_fit_valid = false;
    double stop_time = 0.0;
    double remap_energy_lost = 0.0;
    double wall_time_seconds = 0.0;  ///< reported only in the manifest
    std::string started_at, finished_at;
    CsvTable series;
    std::string config_text;
};

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct ConfigEntry {
    std::string value;
    int line = 0;
};

inline double to_double(const ConfigEntry& e, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw config_error("line " + std::to_string(e.line) + ": value '" + e.value +
                           "' for key '" + key + "' is not a number");
    }
}

inline int to_int(const ConfigEntry& e, const std::string& key) {
    double v = to_double(e, key);
    if (v != std::floor(v))
        throw config_error("line " + std::to_string(e.line) + ": value '" + e.value +
                           "' for key '" + key + "' is not an integer");
    return int(v);
}

}  // namespace detail

/// Parse a plain-text key=value config.  '#' starts a comment; blank lines
/// are ignored.  Unknown keys are rejected, duplicates name both lines, and
/// all missing required keys are reported together.
inline CaseConfig parse_config(const std::string& text) {
    static const std::vector<std::string> known = {
        "nu",          "mu",          "a",          "b",         "eps0",
        "nx",          "ny",          "nz",         "lx",        "ly",
        "lz",          "dt",          "t_end",      "init.template",
        "init.amp_u",  "init.amp_theta", "init.seed", "output.every",
        "remap.period"};
    static const std::vector<std::string> required = {"nu", "nx", "ny", "nz",
                                                      "dt", "t_end"};

    std::map<std::string, detail::ConfigEntry> entries;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) +
                               ": expected key = value, got '" + line + "'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw config_error("line " + std::to_string(lineno) + ": unknown key '" +
                               key + "'");
        auto it = entries.find(key);
        if (it != entries.end())
            throw config_error("duplicate key '" + key + "' on lines " +
                               std::to_string(it->second.line) + " and " +
                               std::to_string(lineno));
        entries[key] = {value, lineno};
    }

    std::string missing;
    for (const auto& k : required)
        if (!entries.count(k)) missing += (missing.empty() ? "" : ", ") + k;
    if (!missing.empty())
        throw config_error("missing required keys: " + missing);

    CaseConfig cfg;
    cfg.source_text = text;
    auto num = [&](const std::string& k, double& dst) {
        if (entries.count(k)) dst = detail::to_double(entries[k], k);
    };
    auto integer = [&](const std::string& k, int& dst) {
        if (entries.count(k)) dst = detail::to_int(entries[k], k);
    };
    num("nu", cfg.params.nu);
    num("mu", cfg.params.mu);
    num("a", cfg.params.a);
    num("b", cfg.params.b);
    num("eps0", cfg.params.eps0);
    integer("nx", cfg.nx);
    integer("ny", cfg.ny);
    integer("nz", cfg.nz);
    num("lx", cfg.lx);
    num("ly", cfg.ly);
    num("lz", cfg.lz);
    num("dt", cfg.params.dt);
    num("t_end", cfg.params.t_end);
    if (entries.count("init.template")) cfg.init.generator = entries["init.template"].value;
    num("init.amp_u", cfg.init.amp_u);
    num("init.amp_theta", cfg.init.amp_theta);
    if (entries.count("init.seed"))
        cfg.init.seed = std::uint64_t(detail::to_int(entries["init.seed"], "init.seed"));
    integer("output.every", cfg.output_every);
    num("remap.period", cfg.params.remap_period);
    cfg.validate();
    return cfg;
}

inline CaseConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return parse_config(os.str());
}

// ---------------------------------------------------------------------------
// Case runner
// ---------------------------------------------------------------------------

namespace detail {

inline std::string iso_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

inline double nonzero_l2(const State& st) {
    double s = 0.0;
    for (const SpectralField* f : {&st.u1, &st.u2, &st.u3}) {
        double n = l2_norm(project_nonzero(*f));
        s += n * n;
    }
    return std::sqrt(s);
}

}  // namespace detail

/// Integrate one case with diagnostics, applying the stop rules in priority
/// order frame_singular > norm_blowup > bootstrap_violated > stable at t_end.
/// A bootstrap violation must persist for 20 consecutive samples to count,
/// filtering transient overshoot of the conservative thresholds.
inline CaseResult run_case(const CaseConfig& cfg,
                           const std::function<void(const State&)>& observer = {}) {
    cfg.validate();
    auto wall_start = std::chrono::steady_clock::now();

    CaseResult res;
    res.started_at = detail::iso_now();
    res.config_text = cfg.source_text;
    res.series.columns = {"t",  "nonzero_l2", "velocity_h2", "e1", "e2",
                          "e3", "e4",         "e5",          "e6", "e7",
                          "bootstrap_ok"};

    Grid g = cfg.grid();
    State st = initial_data(cfg.init, g, cfg.params);
    double initial_h2 = st.velocity_h2();
    double cap = cfg.norm_cap_factor * initial_h2;

    EnergyTracker tracker(cfg.params);
    std::vector<TimeSample> nz_series;
    int violation_streak = 0;
    res.verdict = "stable";

    auto sample = [&](const State& s) -> bool {
        if (observer) observer(s);
        tracker.add_sample(s, cfg.params);
        EnergyReport rep = tracker.report();
        double nz = detail::nonzero_l2(s);
        double h2 = s.velocity_h2();
        res.peak_h2 = std::max(res.peak_h2, h2);
        res.peak_nonzero_l2 = std::max(res.peak_nonzero_l2, nz);
        nz_series.push_back({s.clock.t, nz});
        res.series.rows.push_back({s.clock.t, nz, h2, rep.e1, rep.e2, rep.e3,
                                   rep.e4, rep.e5, rep.e6, rep.e7,
                                   rep.bootstrap_ok ? 1.0 : 0.0});
        res.report = rep;
        res.stop_time = s.clock.t;
        if (rep.frame_singular) {
            res.verdict = "frame_singular";
            return false;
        }
        if (h2 > cap && h2 > 0.0) {
            res.verdict = "norm_blowup";
            return false;
        }
        violation_streak = rep.bootstrap_ok ? 0 : violation_streak + 1;
        if (violation_streak >= 20) {
            res.verdict = "bootstrap_violated";
            return false;
        }
        return true;
    };

    if (sample(st)) {
        int steps = 0;
        while (st.clock.t < cfg.params.t_end - 1e-12) {
            Params p = cfg.params;
            p.dt = std::min(p.dt, cfg.params.t_end - st.clock.t);
            st = advance(st, p, res.remap_energy_lost);
            ++steps;
            if (steps % cfg.output_every == 0 ||
                st.clock.t >= cfg.params.t_end - 1e-12) {
                if (!sample(st)) break;
            }
        }
    }

    // decay-rate fit over the second half of the recorded window
    if (!nz_series.empty()) {
        double t1 = nz_series.back().t;
        try {
            res.decay_rate = fit_decay_rate(nz_series, 0.5 * t1, t1);
            res.decay_fit_valid = true;
        } catch (const domain_error&) {
            res.decay_rate = 0.0;
            res.decay_fit_valid = false;
        }
    }

    res.finished_at = detail::iso_now();
    res.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
            .count();
    return res;
}

/// Deterministic JSON summary.  Wall-clock data is deliberately excluded so
/// identical configs produce byte-identical summaries.
inline nlohmann::json case_result_to_json(const CaseResult& r) {
    nlohmann::json boot = nlohmann::json::array();
    for (const auto& c : r.report.bootstrap)
        boot.push_back({{"name", c.name},
                        {"value", c.value},
                        {"threshold", c.threshold},
                        {"margin", c.margin},
                        {"ok", c.ok}});
    return {{"verdict", r.verdict},
            {"stop_time", r.stop_time},
            {"peak_h2", r.peak_h2},
            {"peak_nonzero_l2", r.peak_nonzero_l2},
            {"decay_rate", r.decay_rate},
            {"decay_fit_valid", r.decay_fit_valid},
            {"remap_energy_lost", r.remap_energy_lost},
            {"energy",
             {{"e1", r.report.e1},
              {"e2", r.report.e2},
              {"e3", r.report.e3},
              {"e4", r.report.e4},
              {"e5", r.report.e5},
              {"e6", r.report.e6},
              {"e7", r.report.e7}}},
            {"bootstrap", boot},
            {"bootstrap_ok", r.report.bootstrap_ok}};
}

/// Write series.csv, summary.json, and manifest.json into dir.  The manifest
/// carries the verbatim config, code version, and wall-clock data plus content
/// hashes of the other two files.
inline void emit_outputs(const CaseResult& r, const CaseConfig& cfg,
                         const std::string& dir) {
    write_csv(r.series, dir + "/series.csv");
    write_json(case_result_to_json(r), dir + "/summary.json");

    Manifest m;
    m.config_text = r.config_text;
    Grid g = cfg.grid();
    m.nx = g.nx;
    m.ny = g.ny;
    m.nz = g.nz;
    m.lx = g.lx;
    m.ly = g.ly;
    m.lz = g.lz;
    m.started_at = r.started_at;
    m.finished_at = r.finished_at;
    m.add_file(dir, "series.csv");
    m.add_file(dir, "summary.json");
    nlohmann::json mj = manifest_to_json(m);
    mj["wall_time_seconds"] = r.wall_time_seconds;
    write_json(mj, dir + "/manifest.json");
}

// ---------------------------------------------------------------------------
// Threshold bisection and exponent fit
// ---------------------------------------------------------------------------

struct BisectRecord {
    double amplitude = 0.0;
    bool stable = false;
};

/// Bisect the amplitude multiplier between a stable lo and an unstable hi.
/// The classifier maps a multiplier to "stable?"; every evaluation is logged.
inline double threshold_bisect(double lo, double hi,
                               const std::function<bool(double)>& stable, int iters,
                               std::vector<BisectRecord>* history = nullptr) {
    if (!(lo < hi)) throw bracket_error("bisection bracket requires lo < hi");
    auto probe = [&](double amp) {
        bool ok = stable(amp);
        if (history) history->push_back({amp, ok});
        return ok;
    };
    if (!probe(lo))
        throw bracket_error("invalid bracket: case at lo = " + format_double(lo) +
                            " is not stable");
    if (probe(hi))
        throw bracket_error("invalid bracket: case at hi = " + format_double(hi) +
                            " is stable");
    for (int i = 0; i < iters; ++i) {
        double mid = 0.5 * (lo + hi);
        if (probe(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Bisect the initial-amplitude multiplier for a config template at a given
/// viscosity; a case is stable when run_case returns verdict "stable".
inline double threshold_bisect(double nu, const CaseConfig& tmpl, double lo,
                               double hi, int iters,
                               std::vector<BisectRecord>* history = nullptr) {
    auto stable = [&](double mult) {
        CaseConfig cfg = tmpl;
        cfg.params.nu = nu;
        cfg.init.amp_u = tmpl.init.amp_u * mult;
        cfg.init.amp_theta = tmpl.init.amp_theta * mult;
        return run_case(cfg).verdict == "stable";
    };
    return threshold_bisect(lo, hi, stable, iters, history);
}

struct BetaFit {
    double beta = 0.0;       ///< threshold ~ Re^{-beta}, Re = 1/nu
    double intercept = 0.0;  ///< log threshold at Re = 1
    double residual = 0.0;   ///< RMS residual of the log-log fit
};

/// Least-squares fit of log(threshold) = -beta*log(Re) + c over (nu, threshold)
/// points with Re = 1/nu.
inline BetaFit beta_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw domain_error("beta_fit: need at least 3 points, got " +
                           std::to_string(points.size()));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [nu, thr] : points) {
        if (nu <= 0.0 || thr <= 0.0)
            throw domain_error("beta_fit: all inputs must be positive");
        double x = std::log(1.0 / nu), y = std::log(thr);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = double(points.size());
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw domain_error("beta_fit: points share a single viscosity");
    double slope = (n * sxy - sx * sy) / denom;
    BetaFit fit;
    fit.beta = -slope;
    fit.intercept = (sy - slope * sx) / n;
    double ss = 0.0;
    for (const auto& [nu, thr] : points) {
        double x = std::log(1.0 / nu);
        double r = std::log(thr) - (slope * x + fit.intercept);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

}  // namespace cblb

#endif
