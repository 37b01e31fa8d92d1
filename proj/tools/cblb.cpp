// cblb: pseudo-spectral simulator and numerical verification lab for the
// perturbed Couette-Boussinesq system.
//
// Subcommands:
//   run <config>      integrate one case, emit series/summary/manifest
//   scan <config>     amplitude-threshold bisection over a viscosity list
//   lemmas <suite>    identity / inequality ratio suites
//   kelvin            sheared-mode closed forms and space-time ratio suites
//
// Exit codes: 0 success, 2 classification inconclusive, 1 error.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cblb/kelvin.hpp"
#include "cblb/scan.hpp"

namespace fs = std::filesystem;
using namespace cblb;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_inconclusive = 2;
constexpr int exit_error = 1;

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

int cmd_run(const std::string& config_path, const std::string& out) {
    CaseConfig cfg = load_config(config_path);
    CaseResult res = run_case(cfg);
    ensure_dir(out);
    emit_outputs(res, cfg, out);
    std::cout << "verdict: " << res.verdict << "\n"
              << "stop_time: " << format_double(res.stop_time) << "\n"
              << "peak_h2: " << format_double(res.peak_h2) << "\n"
              << "decay_rate: " << format_double(res.decay_rate) << "\n"
              << "outputs: " << out << "\n";
    return exit_ok;
}

int cmd_scan(const std::string& config_path, const std::vector<double>& nu_list,
             int bisect_iters, double lo, double hi, const std::string& out) {
    CaseConfig tmpl = load_config(config_path);
    ensure_dir(out);
    nlohmann::json points = nlohmann::json::array();
    std::vector<std::pair<double, double>> thresholds;
    bool inconclusive = false;
    for (double nu : nu_list) {
        nlohmann::json entry = {{"nu", nu}};
        try {
            std::vector<BisectRecord> hist;
            double mult = threshold_bisect(nu, tmpl, lo, hi, bisect_iters, &hist);
            double amp = mult * tmpl.init.amp_u;
            entry["threshold_multiplier"] = mult;
            entry["threshold_amp_u"] = amp;
            entry["evaluations"] = hist.size();
            thresholds.push_back({nu, amp});
            std::cout << "nu=" << nu << " threshold amp_u=" << format_double(amp)
                      << "\n";
        } catch (const bracket_error& e) {
            entry["error"] = e.what();
            inconclusive = true;
            std::cout << "nu=" << nu << " inconclusive: " << e.what() << "\n";
        }
        points.push_back(entry);
    }
    nlohmann::json report = {{"points", points}};
    if (thresholds.size() >= 3) {
        BetaFit f = beta_fit(thresholds);
        report["beta"] = f.beta;
        report["intercept"] = f.intercept;
        report["residual"] = f.residual;
        std::cout << "beta: " << format_double(f.beta) << "\n";
    }
    write_json(report, out + "/scan.json");
    std::cout << "outputs: " << out << "/scan.json\n";
    return inconclusive ? exit_inconclusive : exit_ok;
}

int cmd_lemmas(const std::string& suite, int seeds, int grid_n, double alpha,
               const std::string& out) {
    RatioSuite s;
    if (suite == "identities") {
        Grid g(grid_n, grid_n, grid_n);
        Params p;
        double worst = 0.0;
        std::string verdict = "identity";
        for (int seed = 1; seed <= seeds; ++seed) {
            InitSpec spec;
            spec.generator = "random";
            spec.amp_u = 0.1;
            spec.amp_theta = 0.1;
            spec.seed = std::uint64_t(seed);
            State st = initial_data(spec, g, p);
            RatioSuite si = check_identities(st, std::uint64_t(seed) + 1000);
            worst = std::max(worst, si.max_residual);
            if (si.verdict != "identity") verdict = si.verdict;
            s = si;
        }
        s.max_residual = worst;
        s.verdict = verdict;
        s.n_samples = seeds;
    } else {
        Grid base(grid_n, grid_n, grid_n);
        s = embedding_ratio(suite, base, seeds, 1234, alpha);
    }
    ensure_dir(out);
    write_json(suite_to_json(s), out + "/lemma_" + suite + ".json");
    std::cout << "suite: " << suite << "\n"
              << "verdict: " << s.verdict << "\n"
              << "max_ratio_base: " << format_double(s.max_ratio_base) << "\n"
              << "max_ratio_fine: " << format_double(s.max_ratio_fine) << "\n"
              << "max_residual: " << format_double(s.max_residual) << "\n";
    bool ok = s.verdict == "identity" || s.verdict == "bounded";
    return ok ? exit_ok : exit_inconclusive;
}

int cmd_kelvin(int k1, double eta, int k3, double nu, double t,
               const std::string& suite, double a, const std::string& out) {
    std::cout << "amplitude(t=" << t
              << "): " << format_double(kelvin_amplitude(k1, eta, k3, nu, t)) << "\n";
    if (suite.empty()) return exit_ok;
    Params p;
    p.nu = nu;
    p.a = a;
    ForcingSpec fs;
    fs.c2 = cplx(1.0, 0.0);
    fs.t_end = t;
    RatioSuite s = spacetime_ratio(suite, fs, p);
    ensure_dir(out);
    write_json(suite_to_json(s), out + "/kelvin_" + suite + ".json");
    std::cout << "suite: " << suite << "\n"
              << "verdict: " << s.verdict << "\n"
              << "max_ratio_base: " << format_double(s.max_ratio_base) << "\n"
              << "max_ratio_fine: " << format_double(s.max_ratio_fine) << "\n";
    return s.verdict == "bounded" ? exit_ok : exit_inconclusive;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cblb: shear-frame spectral simulator and estimate lab"};
    app.require_subcommand(1);

    std::string config_path, out = "out";
    std::vector<double> nu_list;
    int bisect_iters = 8;
    double lo = 1.0, hi = 100.0;
    std::string suite = "identities";
    int seeds = 10, grid_n = 32;
    double alpha = 0.75;
    int k1 = 1, k3 = 0;
    double eta = 0.0, nu = 1e-2, t = 10.0, a = 0.05;
    std::string kelvin_suite;

    auto* run = app.add_subcommand("run", "integrate one configured case");
    run->add_option("config", config_path, "key=value config file")->required();
    run->add_option("-o,--out", out, "output directory");

    auto* scan = app.add_subcommand("scan", "threshold bisection over viscosities");
    scan->add_option("config", config_path, "template config file")->required();
    scan->add_option("--nu-list", nu_list, "viscosities to scan")->required();
    scan->add_option("--bisect-iters", bisect_iters, "bisection iterations");
    scan->add_option("--lo", lo, "stable amplitude multiplier");
    scan->add_option("--hi", hi, "unstable amplitude multiplier");
    scan->add_option("-o,--out", out, "output directory");

    auto* lemmas = app.add_subcommand("lemmas", "identity and inequality suites");
    lemmas->add_option("suite", suite,
                       "identities | B1..B6 | KAPPA | L3.1 | L3.2")
        ->required();
    lemmas->add_option("--seeds", seeds, "number of random samples");
    lemmas->add_option("--grid", grid_n, "base grid points per axis");
    lemmas->add_option("--alpha", alpha, "interpolation exponent");
    lemmas->add_option("-o,--out", out, "output directory");

    auto* kelvin = app.add_subcommand("kelvin", "sheared-mode closed forms");
    kelvin->add_option("--k", k1, "streamwise wavenumber k1");
    kelvin->add_option("--eta", eta, "initial wall-normal wavenumber");
    kelvin->add_option("--k3", k3, "spanwise wavenumber");
    kelvin->add_option("--nu", nu, "viscosity");
    kelvin->add_option("--t", t, "evaluation time / suite horizon");
    kelvin->add_option("--suite", kelvin_suite, "A1 | A2 | A4_weighted");
    kelvin->add_option("--a", a, "exponential weight rate");
    kelvin->add_option("-o,--out", out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out);
        if (scan->parsed())
            return cmd_scan(config_path, nu_list, bisect_iters, lo, hi, out);
        if (lemmas->parsed()) return cmd_lemmas(suite, seeds, grid_n, alpha, out);
        if (kelvin->parsed())
            return cmd_kelvin(k1, eta, k3, nu, t, kelvin_suite, a, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}
