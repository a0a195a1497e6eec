#include "spinbus/cli.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spinbus/dynamics.hpp"
#include "spinbus/io.hpp"
#include "spinbus/ladder_effective.hpp"
#include "spinbus/magnon_memory.hpp"
#include "spinbus/models.hpp"
#include "spinbus/spectral.hpp"

namespace spinbus {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

[[noreturn]] void bad_config(const std::string& msg) {
    throw DomainError("config: " + msg);
}

// Strict field reader: every access marks the key as consumed, finish()
// rejects anything left over.
class Params {
  public:
    Params(const json& obj, std::string scope) : obj_(obj), scope_(std::move(scope)) {
        if (!obj_.is_object()) bad_config(scope_ + " must be a JSON object");
    }

    double number(const std::string& key, double fallback) {
        const json* v = fetch(key);
        if (!v) return fallback;
        if (!v->is_number()) bad_config(scope_ + "." + key + " must be a number");
        return v->get<double>();
    }

    long long integer(const std::string& key, long long fallback) {
        const json* v = fetch(key);
        if (!v) return fallback;
        if (!v->is_number_integer())
            bad_config(scope_ + "." + key + " must be an integer");
        return v->get<long long>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const json* v = fetch(key);
        if (!v) return fallback;
        if (!v->is_string()) bad_config(scope_ + "." + key + " must be a string");
        return v->get<std::string>();
    }

    json object(const std::string& key) {
        const json* v = fetch(key);
        if (!v) return json::object();
        if (!v->is_object()) bad_config(scope_ + "." + key + " must be a JSON object");
        return *v;
    }

    std::vector<long long> integer_list(const std::string& key) {
        const json* v = fetch(key);
        std::vector<long long> out;
        if (!v) return out;
        if (!v->is_array()) bad_config(scope_ + "." + key + " must be an array");
        for (const json& e : *v) {
            if (!e.is_number_integer())
                bad_config(scope_ + "." + key + " must hold integers");
            out.push_back(e.get<long long>());
        }
        return out;
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key()))
                bad_config(scope_ + ": unknown field '" + it.key() + "'");
    }

  private:
    const json* fetch(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    const json& obj_;
    std::string scope_;
    std::set<std::string> seen_;
};

int require_int(Params& p, const std::string& key, long long fallback, long long lo,
                long long hi, const std::string& what) {
    long long v = p.integer(key, fallback);
    if (v < lo || v > hi)
        bad_config(what + "." + key + " out of range [" + std::to_string(lo) + ", " +
                   std::to_string(hi) + "]");
    return int(v);
}

double require_num(Params& p, const std::string& key, double fallback, double lo,
                   double hi, const std::string& what) {
    double v = p.number(key, fallback);
    if (!(v >= lo) || !(v <= hi)) bad_config(what + "." + key + " out of range");
    return v;
}

// ---------------------------------------------------------------------------
// Per-experiment parameter schemas: validation fills defaults and returns the
// normalized parameter object. The same tables back `list`.
// ---------------------------------------------------------------------------

json validate_pst(const json& raw) {
    Params p(raw, "parameters");
    json out;
    out["N"] = require_int(p, "N", 0, 2, 62, "pst");
    out["k"] = require_int(p, "k", 0, 0, 1000, "pst");
    out["t_max"] = require_num(p, "t_max", kPi, 1e-12, 1e9, "pst");
    out["n_times"] = require_int(p, "n_times", 401, 2, 2000001, "pst");
    p.finish();
    engineered_couplings(out["N"].get<int>(), out["k"].get<int>()); // preconditions
    return out;
}

json validate_wavepacket(const json& raw) {
    Params p(raw, "parameters");
    json out;
    std::string mode = p.text("mode", "trace");
    if (mode != "trace" && mode != "scan")
        bad_config("wavepacket.mode must be 'trace' or 'scan'");
    out["mode"] = mode;
    if (mode == "trace") {
        out["n_sites"] = require_int(p, "n_sites", 101, 3, 100001, "wavepacket");
        out["N_A"] = require_int(p, "N_A", 5, -50000, 50000, "wavepacket");
        out["Delta"] = require_num(p, "Delta", 10.0, 1e-9, 1e9, "wavepacket");
        out["lambda_scale"] = require_num(p, "lambda_scale", 1.0, 1e-300, 1e9, "wavepacket");
        out["J"] = require_num(p, "J", 1.0, 1e-300, 1e9, "wavepacket");
        out["n_times"] = require_int(p, "n_times", 401, 2, 2000001, "wavepacket");
        out["periods"] = require_num(p, "periods", 1.0, 1e-9, 1e6, "wavepacket");
        WavepacketSpec spec{out["n_sites"].get<int>(), out["N_A"].get<int>(),
                            out["Delta"].get<double>(), out["lambda_scale"].get<double>()};
        spec.validate();
    } else {
        int L = require_int(p, "L", 500, 2, 100000, "wavepacket");
        if (L % 2 != 0) bad_config("wavepacket.L must be even (L = 2|N_A|)");
        out["L"] = L;
        out["Delta"] = require_num(p, "Delta", 6.0, 1e-9, 1e9, "wavepacket");
        double lo = require_num(p, "lambda_min", 1e-5, 1e-300, 1e9, "wavepacket");
        double hi = require_num(p, "lambda_max", 1e-1, 1e-300, 1e9, "wavepacket");
        if (!(lo < hi)) bad_config("wavepacket.lambda_min must be < lambda_max");
        out["lambda_min"] = lo;
        out["lambda_max"] = hi;
        out["n_grid"] = require_int(p, "n_grid", 25, 2, 10000, "wavepacket");
    }
    p.finish();
    return out;
}

json validate_ladder(const json& raw) {
    Params p(raw, "parameters");
    json out;
    out["J"] = require_num(p, "J", 20.0, 1e-300, 1e9, "ladder");
    out["J0"] = require_num(p, "J0", 1.0, 0.0, 1e9, "ladder");
    std::string conn = p.text("connection", "a");
    if (conn != "a" && conn != "b") bad_config("ladder.connection must be 'a' or 'b'");
    out["connection"] = conn;
    bool has_single = p.has("L");
    std::vector<long long> ls = p.integer_list("L_values");
    if (has_single && !ls.empty()) bad_config("ladder: give either L or L_values");
    if (has_single) ls = {p.integer("L", 0)};
    if (ls.empty()) ls = {4, 5, 6, 7};
    json arr = json::array();
    for (long long l : ls) {
        if (l < 2 || l > 1000000) bad_config("ladder: L must be >= 2");
        arr.push_back(l);
    }
    out["L_values"] = arr;
    p.finish();
    return out;
}

json validate_memory(const json& raw) {
    Params p(raw, "parameters");
    json out;
    out["N"] = require_int(p, "N", 512, 2, 1000000, "memory");
    out["J"] = require_num(p, "J", 1.0, 1e-300, 1e9, "memory");
    out["B0"] = p.number("B0", 0.0);
    if (out["B0"].get<double>() != 0.0)
        bad_config("memory.B0 must be 0 (resonant storage protocol)");
    out["gn_mu_n"] = require_num(p, "gn_mu_n", 1.0, -1e9, 1e9, "memory");
    out["ge_mu_b"] = require_num(p, "ge_mu_b", 1.0, -1e9, 1e9, "memory");
    out["lambda"] = require_num(p, "lambda", 1.0, 1e-300, 1e9, "memory");
    out["s"] = require_num(p, "s", 0.5, 1e-300, 1e9, "memory");
    std::string profile = p.text("profile", "gaussian");
    if (profile != "gaussian" && profile != "uniform")
        bad_config("memory.profile must be 'gaussian' or 'uniform'");
    out["profile"] = profile;
    if (profile == "gaussian")
        out["sigma"] = require_num(p, "sigma", double(out["N"].get<int>()), 1e-9, 1e12,
                                   "memory");
    else if (p.has("sigma"))
        bad_config("memory.sigma only applies to the gaussian profile");
    out["broadening"] = require_num(p, "broadening", 0.0, 0.0, 1e9, "memory");
    out["t_max"] = require_num(p, "t_max", 0.0, 0.0, 1e12, "memory");
    out["n_times"] = require_int(p, "n_times", 401, 2, 2000001, "memory");
    out["n_samples"] = require_int(p, "n_samples", 10, 1, 10000, "memory");
    p.finish();

    MemoryParams mp;
    mp.N = out["N"].get<int>();
    mp.J = out["J"].get<double>();
    mp.lambda = out["lambda"].get<double>();
    mp.s = out["s"].get<double>();
    mp.sigma = profile == "gaussian" ? out["sigma"].get<double>() : 1.0;
    mp.validate();
    return out;
}

json validate_config(const json& cfg) {
    Params top(cfg, "config");
    json out;
    std::string experiment = top.text("experiment", "");
    if (experiment.empty()) bad_config("missing required field 'experiment'");
    if (experiment != "pst" && experiment != "wavepacket" && experiment != "ladder" &&
        experiment != "memory")
        bad_config("unknown experiment '" + experiment + "'");
    out["experiment"] = experiment;

    json raw_params = top.object("parameters");
    if (experiment == "pst") out["parameters"] = validate_pst(raw_params);
    else if (experiment == "wavepacket") out["parameters"] = validate_wavepacket(raw_params);
    else if (experiment == "ladder") out["parameters"] = validate_ladder(raw_params);
    else out["parameters"] = validate_memory(raw_params);

    std::string output_dir = top.text("output_dir", "");
    if (!output_dir.empty()) out["output_dir"] = output_dir;
    long long seed = top.integer("seed", 0);
    if (seed < 0) bad_config("seed must be >= 0");
    out["seed"] = seed;
    top.finish();
    return out;
}

// ---------------------------------------------------------------------------
// Experiment runners: pure compute into an in-memory file map; nothing touches
// the filesystem until every output exists.
// ---------------------------------------------------------------------------

using FileMap = std::map<std::string, std::string>;

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return xs;
}

std::string trace_csv(const FidelityTrace& tr) {
    std::string body = "t,fidelity\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        body += csv_row({tr.times[i], tr.values[i]});
    return body;
}

json complex_json(const std::complex<double>& z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

json matrix2_json(const Eigen::Matrix2cd& m) {
    json rows = json::array();
    for (int r = 0; r < 2; ++r) {
        json row = json::array();
        for (int c = 0; c < 2; ++c) row.push_back(complex_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

FileMap run_pst(const json& params) {
    const int N = params["N"].get<int>();
    const int k = params["k"].get<int>();
    CouplingProfile profile = engineered_couplings(N, k);
    HamiltonianMatrix H = xy_chain_single_excitation(profile);

    FidelityTrace tr = transfer_fidelity(
        H, 1, N,
        linspace(0.0, params["t_max"].get<double>(), params["n_times"].get<int>()));

    std::vector<std::size_t> mirror(N);
    for (int i = 0; i < N; ++i) mirror[i] = std::size_t(N - 1 - i);
    SpectrumReport rep = analyze_spectrum(H, mirror);
    double deviation = rep.E0 ? evolution_is_mirror(H, *rep.E0, mirror)
                              : std::numeric_limits<double>::quiet_NaN();

    json spectrum;
    spectrum["model"] = {{"N", N}, {"k", k}, {"couplings", profile.couplings}};
    spectrum["eigenvalues"] = std::vector<double>(
        rep.eigenvalues.data(), rep.eigenvalues.data() + rep.eigenvalues.size());
    spectrum["parities"] = rep.parities;
    if (rep.E0) spectrum["E0"] = *rep.E0;
    if (rep.labels) spectrum["labels"] = *rep.labels;
    spectrum["verdict"] = to_string(rep.verdict);
    spectrum["parity_residual"] = rep.parity_residual;
    spectrum["commensuration_residual"] = rep.commensuration_residual;
    if (rep.E0) spectrum["evolution_deviation"] = deviation;

    FileMap files;
    files["fidelity.csv"] = trace_csv(tr);
    files["spectrum.json"] = spectrum.dump(2) + "\n";
    return files;
}

FileMap run_wavepacket(const json& params, int threads) {
    FileMap files;
    if (params["mode"] == "trace") {
        WavepacketSpec spec{params["n_sites"].get<int>(), params["N_A"].get<int>(),
                            params["Delta"].get<double>(),
                            params["lambda_scale"].get<double>()};
        const double J = params["J"].get<double>();
        FieldProfile field = parabolic_field(spec.n_sites, spec.B0());
        HamiltonianMatrix H = parabolic_chain_single_excitation(spec.n_sites, J, field);

        double omega = spec.alpha2() * std::sqrt(spec.lambda_scale * J);
        double period = 2.0 * kPi / omega;
        double t_max = params["periods"].get<double>() * period;
        std::vector<double> times = linspace(0.0, t_max, params["n_times"].get<int>());

        FidelityTrace tr = packet_transfer_trace(H, spec, times);
        FidelityTrace analytic;
        analytic.times = times;
        double sup = 0.0;
        std::size_t peak = 0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            analytic.values.push_back(
                analytic_packet_fidelity(times[i], spec.alpha2(), spec.N_A, omega));
            sup = std::max(sup, std::abs(analytic.values[i] - tr.values[i]));
            if (tr.values[i] > tr.values[peak]) peak = i;
        }

        json report;
        report["model"] = {{"n_sites", spec.n_sites}, {"N_A", spec.N_A},
                           {"Delta", spec.Delta},     {"lambda_scale", spec.lambda_scale},
                           {"J", J}};
        report["alpha2"] = spec.alpha2();
        report["B0"] = spec.B0();
        report["omega"] = omega;
        report["period"] = period;
        report["f_max"] = tr.values[peak];
        report["t_peak"] = times[peak];
        report["sup_norm_vs_analytic"] = sup;

        files["fidelity.csv"] = trace_csv(tr);
        files["analytic.csv"] = trace_csv(analytic);
        files["report.json"] = report.dump(2) + "\n";
    } else {
        const int L = params["L"].get<int>();
        const double Delta = params["Delta"].get<double>();
        std::vector<double> grid =
            log_grid(params["lambda_min"].get<double>(), params["lambda_max"].get<double>(),
                     params["n_grid"].get<int>());
        ScanResult res = scan_field_scale(L, Delta, grid, 0.0, threads);

        std::string body = "lambda_scale,f_max,t_peak\n";
        for (const ScanPoint& pt : res.grid)
            body += csv_row({pt.lambda_scale, pt.f_max, pt.t_peak});

        double alpha2 = 4.0 * std::numbers::ln2 / (Delta * Delta);
        json report;
        report["L"] = L;
        report["Delta"] = Delta;
        report["best_lambda"] = res.best_lambda;
        report["f_max"] = res.f_max;
        report["t_peak"] = res.t_peak;
        report["period_estimate"] = res.period_estimate;
        report["period_analytic_at_best"] =
            2.0 * kPi / (alpha2 * std::sqrt(res.best_lambda));

        files["scan.csv"] = body;
        files["report.json"] = report.dump(2) + "\n";
    }
    return files;
}

FileMap run_ladder(const json& params) {
    const double J = params["J"].get<double>();
    const double J0 = params["J0"].get<double>();
    Connection conn = params["connection"] == "a" ? Connection::type_a
                                                  : Connection::type_b;
    std::vector<int> ls;
    for (const json& l : params["L_values"]) ls.push_back(l.get<int>());

    FileMap files;
    json report;
    report["J"] = J;
    report["J0"] = J0;
    report["connection"] = params["connection"];
    std::string body = "L,J,J0,gap,jeff_perturbative\n";

    if (ls.size() >= 3) {
        ScalingFit fit = jeff_scaling_fit(ls, J, J0, conn);
        for (const ScalingRow& r : fit.rows)
            body += std::to_string(r.L) + "," + format_double(r.J) + "," +
                    format_double(r.J0) + "," + format_double(r.gap) + "," +
                    format_double(r.jeff_perturbative) + "\n";
        report["fit"] = {{"exponent", fit.exponent},
                         {"prefactor", fit.prefactor},
                         {"r_squared", fit.r_squared}};
    } else {
        json points = json::array();
        for (int L : ls) {
            LadderSpec spec{L - 1, J, J0, conn};
            EffectiveCouplingReport exact = exact_spin_gap(spec);
            EffectiveCouplingReport pert = perturbative_jeff(spec);
            body += std::to_string(L) + "," + format_double(J) + "," +
                    format_double(J0) + "," + format_double(exact.gap) + "," +
                    format_double(pert.j_eff) + "\n";
            json pt;
            pt["L"] = L;
            pt["n_rungs"] = spec.n_rungs;
            pt["gap"] = exact.gap;
            pt["j_eff_exact"] = exact.j_eff;
            pt["ground_spin"] = exact.ground_spin;
            pt["degenerate_ground"] = exact.degenerate_ground;
            pt["cluster_energies"] = exact.cluster_energies;
            pt["jeff_perturbative"] = pert.j_eff;
            pt["epsilon"] = pert.epsilon;
            points.push_back(pt);
        }
        report["points"] = points;
    }

    files["scaling.csv"] = body;
    files["report.json"] = report.dump(2) + "\n";
    return files;
}

Eigen::Matrix2cd random_density_matrix(std::mt19937_64& rng, bool pure) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (pure) {
        Eigen::Vector2cd v;
        v << std::complex<double>(gauss(rng), gauss(rng)),
            std::complex<double>(gauss(rng), gauss(rng));
        v.normalize();
        return v * v.adjoint();
    }
    Eigen::Matrix2cd a;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            a(r, c) = std::complex<double>(gauss(rng), gauss(rng));
    Eigen::Matrix2cd rho = a * a.adjoint();
    return rho / rho.trace().real();
}

FileMap run_memory(const json& params, long long seed) {
    MemoryParams mp;
    mp.N = params["N"].get<int>();
    mp.J = params["J"].get<double>();
    mp.B0 = params["B0"].get<double>();
    mp.gn_mu_n = params["gn_mu_n"].get<double>();
    mp.ge_mu_b = params["ge_mu_b"].get<double>();
    mp.lambda = params["lambda"].get<double>();
    mp.s = params["s"].get<double>();
    const bool gaussian = params["profile"] == "gaussian";
    mp.sigma = gaussian ? params["sigma"].get<double>() : 1.0;

    std::vector<double> profile =
        gaussian ? gaussian_lambda_profile(mp.N, mp.sigma, mp.lambda)
                 : std::vector<double>(mp.N, mp.lambda);
    ModeCouplings modes = chi_profile(profile);
    if (gaussian) modes.sigma = mp.sigma;

    const double g = mp.g();
    const double gamma = decay_rate(mp, modes, params["broadening"].get<double>());

    std::string modes_body = "k,omega_k,re_chi,im_chi,abs_chi\n";
    for (int k = 1; k <= mp.N; ++k) {
        std::complex<double> chi =
            k == mp.N ? std::complex<double>(1.0, 0.0) : modes.chi[k - 1];
        modes_body += std::to_string(k) + "," + format_double(dispersion(mp, k)) + "," +
                      format_double(chi.real()) + "," + format_double(chi.imag()) + "," +
                      format_double(std::abs(chi)) + "\n";
    }

    double t_max = params["t_max"].get<double>();
    if (t_max <= 0.0) t_max = kPi / g;
    std::vector<double> times = linspace(0.0, t_max, params["n_times"].get<int>());
    FidelityTrace sim = simulate_inhomogeneous(mp, modes, times);

    bool analytic_ok = gamma < g;
    FidelityTrace analytic;
    analytic.times = times;
    double sup = 0.0;
    if (analytic_ok) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            analytic.values.push_back(analytic_storage_fidelity(times[i], gamma, g));
            sup = std::max(sup, std::abs(analytic.values[i] - sim.values[i]));
        }
    }

    std::mt19937_64 rng(0x9e3779b97f4a7c15ull ^ std::uint64_t(seed));
    json samples = json::array();
    double max_residual = 0.0, max_decode = 0.0;
    const int n_samples = params["n_samples"].get<int>();
    for (int i = 0; i < n_samples; ++i) {
        Eigen::Matrix2cd rho = random_density_matrix(rng, i % 2 == 0);
        StorageReport rep = simulate_storage_map(mp, rho);
        max_residual = std::max(max_residual, rep.residual);
        max_decode = std::max(max_decode, rep.decode_residual);
        json s;
        s["pure"] = (i % 2 == 0);
        s["rho_e"] = matrix2_json(rep.rho_e);
        s["w"] = matrix2_json(rep.w);
        s["residual"] = rep.residual;
        s["decode_residual"] = rep.decode_residual;
        s["fidelity_at_T"] = rep.fidelity_at_T;
        samples.push_back(s);
    }

    json storage;
    storage["N"] = mp.N;
    storage["g"] = g;
    storage["T"] = mp.storage_time();
    storage["gamma"] = gamma;
    storage["gamma_over_g"] = gamma / g;
    storage["profile"] = params["profile"];
    if (gaussian) storage["sigma"] = mp.sigma;
    storage["analytic_in_regime"] = analytic_ok;
    if (analytic_ok) storage["sup_norm_analytic_vs_simulated"] = sup;
    storage["decoding_unitary"] = matrix2_json(storage_decoding_unitary());
    storage["max_residual"] = max_residual;
    storage["max_decode_residual"] = max_decode;
    storage["samples"] = samples;

    FileMap files;
    files["modes.csv"] = modes_body;
    files["fidelity.csv"] = trace_csv(sim);
    if (analytic_ok) files["analytic.csv"] = trace_csv(analytic);
    files["storage.json"] = storage.dump(2) + "\n";
    return files;
}

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

} // namespace

std::string validate_config_text(const std::string& json_text) {
    json cfg;
    try {
        cfg = json::parse(json_text);
    } catch (const json::exception& e) {
        bad_config(std::string("invalid JSON: ") + e.what());
    }
    return validate_config(cfg).dump(2) + "\n";
}

int run_experiment_file(const std::filesystem::path& config_path,
                        const std::string& expected_experiment,
                        const std::string& output_override, int threads) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot read config file " << config_path << "\n";
        return kExitValidation;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    json cfg;
    try {
        cfg = json::parse(validate_config_text(buffer.str()));
        if (!expected_experiment.empty() &&
            cfg["experiment"].get<std::string>() != expected_experiment)
            bad_config("config experiment '" + cfg["experiment"].get<std::string>() +
                       "' does not match the invoked subcommand '" +
                       expected_experiment + "'");
        if (threads < 1) bad_config("--threads must be >= 1");
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    const std::string experiment = cfg["experiment"].get<std::string>();
    auto t0 = std::chrono::steady_clock::now();

    // compute fully in memory: on any failure no output directory is created
    FileMap files;
    try {
        if (experiment == "pst") files = run_pst(cfg["parameters"]);
        else if (experiment == "wavepacket") files = run_wavepacket(cfg["parameters"], threads);
        else if (experiment == "ladder") files = run_ladder(cfg["parameters"]);
        else files = run_memory(cfg["parameters"], cfg["seed"].get<long long>());
    } catch (const CapacityError& e) {
        std::cerr << "error: capacity: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: convergence: " << e.what()
                  << " (best residual " << e.best_residual << ")\n";
        return kExitCapacity;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory\n";
        return kExitCapacity;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fs::path out_dir;
    if (!output_override.empty()) out_dir = output_override;
    else if (cfg.contains("output_dir")) out_dir = cfg["output_dir"].get<std::string>();
    else {
        out_dir = experiment + "_" + utc_timestamp();
        for (int suffix = 2; fs::exists(out_dir); ++suffix)
            out_dir = experiment + "_" + utc_timestamp() + "_" + std::to_string(suffix);
    }

    try {
        fs::create_directories(out_dir);
        json manifest;
        manifest["config"] = cfg;
        manifest["version"] = kToolVersion;
        manifest["wall_time_s"] = wall;
        manifest["status"] = "ok";
        json sums;
        for (const auto& [name, body] : files) {
            write_text_file(out_dir / name, body);
            sums[name] = sha256_hex(body);
        }
        manifest["outputs"] = sums;
        write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "error: writing outputs: " << e.what() << "\n";
        return kExitValidation;
    }
    std::cout << out_dir.string() << "\n";
    return kExitOk;
}

namespace {

json schema_json() {
    json s;
    s["pst"] = {
        {"description", "perfect state transfer on an engineered XY chain"},
        {"outputs", {"fidelity.csv", "spectrum.json"}},
        {"parameters",
         {{"N", "chain length (int >= 2; required)"},
          {"k", "coupling family index (int >= 0; default 0; k > 0 needs even N)"},
          {"t_max", "trace end time (default pi)"},
          {"n_times", "samples on [0, t_max] (default 401)"}}}};
    s["wavepacket"] = {
        {"description", "Gaussian wavepacket transfer in a parabolic field"},
        {"outputs", {"fidelity.csv", "analytic.csv", "scan.csv", "report.json"}},
        {"parameters",
         {{"mode", "'trace' (default) or 'scan'"},
          {"n_sites", "trace: odd chain length (default 101)"},
          {"N_A", "trace: packet center offset (default 5)"},
          {"Delta", "packet FWHM (trace default 10, scan default 6)"},
          {"lambda_scale", "trace: field scale (default 1)"},
          {"J", "trace: hopping (default 1)"},
          {"n_times", "trace: samples (default 401)"},
          {"periods", "trace: horizon in revival periods (default 1)"},
          {"L", "scan: transfer distance, even (default 500)"},
          {"lambda_min", "scan: grid start (default 1e-5)"},
          {"lambda_max", "scan: grid end (default 1e-1)"},
          {"n_grid", "scan: log-grid points (default 25)"}}}};
    s["ladder"] = {
        {"description", "spin-ladder-mediated effective qubit coupling"},
        {"outputs", {"scaling.csv", "report.json"}},
        {"parameters",
         {{"J", "ladder exchange (default 20)"},
          {"J0", "qubit-ladder exchange (default 1)"},
          {"connection", "'a' same-leg or 'b' diagonal (default 'a')"},
          {"L", "single length point, L = n_rungs + 1"},
          {"L_values", "length list for the scaling fit (default [4,5,6,7])"}}}};
    s["memory"] = {
        {"description", "magnon-based quantum memory on a polarized spin ring"},
        {"outputs", {"modes.csv", "fidelity.csv", "analytic.csv", "storage.json"}},
        {"parameters",
         {{"N", "ring size (default 512)"},
          {"J", "ring exchange (default 1)"},
          {"B0", "field; must be 0 for the resonant protocol"},
          {"gn_mu_n", "ring Zeeman coefficient (default 1)"},
          {"ge_mu_b", "electron Zeeman coefficient (default 1)"},
          {"lambda", "hyperfine scale (default 1)"},
          {"s", "site spin (default 0.5)"},
          {"profile", "'gaussian' (default) or 'uniform'"},
          {"sigma", "gaussian width in sites (default N)"},
          {"broadening", "Lorentzian width for gamma; 0 = local spacing"},
          {"t_max", "trace end time; 0 = pi/g (default)"},
          {"n_times", "samples (default 401)"},
          {"n_samples", "randomized storage-map inputs (default 10)"}}}};
    return s;
}

} // namespace

int list_experiments(bool json_mode, const std::string& only) {
    json schema = schema_json();
    if (!only.empty() && !schema.contains(only)) {
        std::cerr << "error: unknown experiment '" << only << "'\n";
        return kExitValidation;
    }
    if (json_mode) {
        if (only.empty()) std::cout << schema.dump(2) << "\n";
        else std::cout << json{{only, schema[only]}}.dump(2) << "\n";
        return kExitOk;
    }
    for (auto it = schema.begin(); it != schema.end(); ++it) {
        if (!only.empty() && it.key() != only) continue;
        std::cout << it.key() << "  -  "
                  << it.value()["description"].get<std::string>() << "\n";
        for (auto p = it.value()["parameters"].begin();
             p != it.value()["parameters"].end(); ++p)
            std::cout << "    " << p.key() << ": " << p.value().get<std::string>()
                      << "\n";
    }
    return kExitOk;
}

} // namespace spinbus
