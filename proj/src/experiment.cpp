#include "fracwest/experiment.hpp"

#include "fracwest/kernels.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fracwest {

namespace {

using nlohmann::json;

// Smooth bump supported on [c-3w, c+3w], continuous at the support edge.
double bump(double x, double center, double width, double amp) {
    const double s = (x - center) / width;
    if (std::abs(s) >= 3.0) return 0.0;
    const double edge = std::exp(-9.0);
    return amp * (std::exp(-s * s) - edge) / (1.0 - edge);
}

double smoothstep_ramp(double t, double t_on) {
    if (t <= 0.0) return 0.0;
    if (t >= t_on) return 1.0;
    const double s = t / t_on;
    return s * s * (3.0 - 2.0 * s);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    return f;
}

void require_case(const std::string& c) {
    if (c != "A" && c != "B" && c != "C" && c != "custom")
        throw std::invalid_argument("config: case must be one of A, B, C, custom");
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        for (const auto& [key, val] : j.items()) {
            if (key == "case") c.test_case = val.get<std::string>();
            else if (key == "alpha") c.alpha = val.get<double>();
            else if (key == "b_damp") c.b_damp = val.get<double>();
            else if (key == "noise_rel") c.noise_rel = val.get<double>();
            else if (key == "n_cells") c.n_cells = val.get<int>();
            else if (key == "n_steps") c.n_steps = val.get<int>();
            else if (key == "t_final") c.t_final = val.get<double>();
            else if (key == "source_amplitude") c.source_amplitude = val.get<double>();
            else if (key == "source_freq") c.source_freq = val.get<double>();
            else if (key == "newton_alpha0") c.newton.alpha0 = val.get<double>();
            else if (key == "newton_theta") c.newton.theta = val.get<double>();
            else if (key == "newton_max_iters") c.newton.max_iters = val.get<int>();
            else if (key == "penalty_weight") c.newton.penalty_weight = val.get<double>();
            else if (key == "tau_discrepancy") c.newton.tau_discrepancy = val.get<double>();
            else if (key == "rng_seed") c.rng_seed = val.get<std::uint64_t>();
            else throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: bad value type: ") + e.what());
    }
    require_case(c.test_case);
    if (!(c.alpha > 0.0 && c.alpha < 1.0))
        throw std::invalid_argument("config: alpha must lie in (0,1)");
    if (c.b_damp < 0.0) throw std::invalid_argument("config: b_damp must be >= 0");
    if (c.noise_rel < 0.0) throw std::invalid_argument("config: noise_rel must be >= 0");
    if (c.n_steps <= 0 || !(c.t_final > 0.0))
        throw std::invalid_argument("config: need n_steps > 0 and t_final > 0");
    if (!(c.newton.theta > 0.0 && c.newton.theta < 1.0) || !(c.newton.alpha0 > 0.0) ||
        !(c.newton.tau_discrepancy > 1.0) || c.newton.penalty_weight < 0.0 || c.newton.max_iters < 0)
        throw std::invalid_argument("config: invalid Newton parameters");
    (void)Mesh1D::uniform(c.n_cells); // validates n_cells
    return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot read " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["case"] = test_case;
    j["alpha"] = alpha;
    j["b_damp"] = b_damp;
    j["noise_rel"] = noise_rel;
    j["n_cells"] = n_cells;
    j["n_steps"] = n_steps;
    j["t_final"] = t_final;
    j["source_amplitude"] = source_amplitude;
    j["source_freq"] = source_freq;
    j["newton_alpha0"] = newton.alpha0;
    j["newton_theta"] = newton.theta;
    j["newton_max_iters"] = newton.max_iters;
    j["penalty_weight"] = newton.penalty_weight;
    j["tau_discrepancy"] = newton.tau_discrepancy;
    j["rng_seed"] = rng_seed;
    return j.dump(2);
}

void make_truth(const std::string& test_case, const Mesh1D& mesh, CoeffField& kappa_true,
                CoeffField& slowness_true) {
    require_case(test_case);
    kappa_true.assign(mesh.n_nodes(), 0.0);
    slowness_true.assign(mesh.n_nodes(), 1.0);
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        const double x = mesh.nodes[i];
        slowness_true[i] += bump(x, 0.5, 0.15, 0.1);
        if (test_case == "A" || test_case == "B") {
            kappa_true[i] = bump(x, 0.65, 0.1, 0.2);
        } else if (test_case == "C") {
            kappa_true[i] = bump(x, 0.15, 0.05, 0.2) + bump(x, 0.75, 0.08, 0.2);
        }
    }
    if (test_case == "custom") slowness_true.assign(mesh.n_nodes(), 1.0);
}

Excitation make_source(const ExperimentConfig& cfg, const Mesh1D& mesh, const TimeGrid& grid) {
    const double sign = (cfg.test_case == "B") ? 1.0 : -1.0;
    const double amp = cfg.source_amplitude;
    const double freq = cfg.source_freq;
    // Spatial profile sin(pi x/2): the first Dirichlet-Neumann eigenfunction,
    // so the driven field vanishes at x=0 and is largest near x=1. The
    // rectified temporal factor keeps the forcing one-signed, which keeps u
    // one-signed (negative for cases A and C, positive for B).
    return Excitation::from_function(mesh, grid, [=](double x, double t) {
        const double g = std::sin(0.5 * std::numbers::pi * x);
        const double s = std::sin(std::numbers::pi * freq * t);
        return sign * amp * g * s * s * smoothstep_ramp(t, 0.25);
    });
}

NoisyData synthesize(const ExperimentConfig& cfg) {
    // Synthesis on a strictly finer grid than inversion (no inverse crime).
    ExperimentConfig fine = cfg;
    fine.n_cells = 2 * cfg.n_cells;
    fine.n_steps = 2 * cfg.n_steps;
    const Mesh1D fmesh = fine.mesh();
    const TimeGrid fgrid = fine.grid();

    ModelParams params;
    params.alpha = cfg.alpha;
    params.b_damp = cfg.b_damp;
    make_truth(cfg.test_case, fmesh, params.kappa, params.slowness);

    const Excitation src = make_source(fine, fmesh, fgrid);
    const StateHistory u = run_forward(params, src, fmesh, fgrid);
    const Trace fine_tr = observe(u, fmesh, kSigma);

    const TimeGrid grid = cfg.grid();
    NoisyData d;
    d.clean.locations = fine_tr.locations;
    d.clean.n_steps = cfg.n_steps;
    d.clean.samples.resize(kSigma.size() * static_cast<std::size_t>(cfg.n_steps + 1));
    for (std::size_t l = 0; l < kSigma.size(); ++l)
        for (int n = 0; n <= cfg.n_steps; ++n)
            d.clean.samples[l * (cfg.n_steps + 1) + n] = fine_tr.at(static_cast<int>(l), 2 * n);

    d.noisy = d.clean;
    if (cfg.noise_rel > 0.0) {
        // Deterministic Gaussian draws (explicit Box-Muller over mt19937_64).
        std::mt19937_64 rng(cfg.rng_seed);
        auto uniform = [&] {
            return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
        };
        std::vector<double> g(d.clean.samples.size());
        for (std::size_t i = 0; i + 1 < g.size(); i += 2) {
            const double r = std::sqrt(-2.0 * std::log(uniform()));
            const double phi = 2.0 * std::numbers::pi * uniform();
            g[i] = r * std::cos(phi);
            g[i + 1] = r * std::sin(phi);
        }
        if (g.size() % 2 == 1)
            g.back() = std::sqrt(-2.0 * std::log(uniform())) *
                       std::cos(2.0 * std::numbers::pi * uniform());

        Trace gt = d.clean;
        gt.samples = g;
        const double gnorm = trace_norm(gt, grid);
        const double hnorm = trace_norm(d.clean, grid);
        const double scale = cfg.noise_rel * hnorm / gnorm;
        for (std::size_t i = 0; i < g.size(); ++i) d.noisy.samples[i] += scale * g[i];
        d.delta = cfg.noise_rel * hnorm; // exact by construction
    }
    return d;
}

double field_error(const CoeffField& f, const CoeffField& truth, const Mesh1D& mesh, double a,
                   double b) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        const double x = mesh.nodes[i];
        if (x < a - 1e-12 || x > b + 1e-12) continue;
        double w = mesh.h;
        if (std::abs(x - a) < 1e-12 || std::abs(x - b) < 1e-12) w *= 0.5;
        const double d = f[i] - truth[i];
        num += w * d * d;
        den += w * truth[i] * truth[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

namespace {

ReconstructionResult run_case(const ExperimentConfig& cfg) {
    const Mesh1D mesh = cfg.mesh();
    const TimeGrid grid = cfg.grid();

    ReconstructionResult res;
    make_truth(cfg.test_case, mesh, res.kappa_true, res.slowness_true);

    const NoisyData data = synthesize(cfg);
    res.delta = data.delta;

    ModelParams tmpl;
    tmpl.alpha = cfg.alpha;
    tmpl.b_damp = cfg.b_damp;

    // Frozen background: kappa = 0, slowness = 1.
    ModelParams frozen = tmpl;
    frozen.kappa.assign(mesh.n_nodes(), 0.0);
    frozen.slowness.assign(mesh.n_nodes(), 1.0);
    const Excitation src = make_source(cfg, mesh, grid);
    const StateHistory background = run_forward(frozen, src, mesh, grid);
    const JacobianMatrix kmat = assemble(background, tmpl, mesh, grid, kSigma);

    NewtonConfig ncfg = cfg.newton;
    ncfg.noise_level_delta = data.delta;

    NewtonProblem prob;
    prob.mesh = &mesh;
    prob.grid = &grid;
    prob.params_template = tmpl;
    prob.source = &src;
    prob.kmat = &kmat;
    prob.h_obs = &data.noisy;
    prob.ground_truth = stack_fields(res.kappa_true, res.slowness_true, mesh);

    res.state = run_newton(ncfg, prob);
    res.stopped_by_discrepancy = res.state.stopped_by_discrepancy;
    return res;
}

void write_recon_csv(const std::string& path, const Mesh1D& mesh, const CoeffField& truth,
                     const std::vector<std::vector<double>>& iterates, int block_offset) {
    auto f = open_out(path);
    f << "x,true";
    for (std::size_t n = 1; n < iterates.size(); ++n) f << ",iter" << n;
    f << ",final\n";
    const int nf = mesh.n_free();
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        f << fmt(mesh.nodes[i]) << ',' << fmt(truth[i]);
        for (std::size_t n = 1; n < iterates.size(); ++n) {
            const double v = (i == 0) ? (block_offset == 0 ? 0.0 : 1.0)
                                      : iterates[n][block_offset + i - 1];
            f << ',' << fmt(v);
        }
        const auto& last = iterates.back();
        const double v = (i == 0) ? (block_offset == 0 ? 0.0 : 1.0) : last[block_offset + i - 1];
        f << ',' << fmt(v) << '\n';
    }
    (void)nf;
}

} // namespace

ReconstructionResult reconstruct(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    ReconstructionResult res = run_case(cfg);
    const Mesh1D mesh = cfg.mesh();
    const int nf = mesh.n_free();

    write_recon_csv(out_dir + "/recon_kappa.csv", mesh, res.kappa_true, res.state.iterates, 0);
    write_recon_csv(out_dir + "/recon_slowness.csv", mesh, res.slowness_true, res.state.iterates, nf);

    auto f = open_out(out_dir + "/newton_history.csv");
    const bool with_err = !res.state.err_kappa_history.empty();
    f << "n,alpha_n,residual_norm";
    if (with_err) f << ",err_kappa_L2,err_slowness_L2";
    f << '\n';
    for (std::size_t n = 0; n < res.state.residual_history.size(); ++n) {
        const double a = (n == 0) ? 0.0 : res.state.alpha_history[n - 1];
        f << n << ',' << fmt(a) << ',' << fmt(res.state.residual_history[n]);
        if (with_err)
            f << ',' << fmt(res.state.err_kappa_history[n]) << ','
              << fmt(res.state.err_slowness_history[n]);
        f << '\n';
    }
    write_meta_json(out_dir, cfg);
    return res;
}

std::vector<double> dump_singular_values(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const Mesh1D mesh = cfg.mesh();
    const TimeGrid grid = cfg.grid();

    ModelParams tmpl;
    tmpl.alpha = cfg.alpha;
    tmpl.b_damp = cfg.b_damp;
    ModelParams frozen = tmpl;
    frozen.kappa.assign(mesh.n_nodes(), 0.0);
    frozen.slowness.assign(mesh.n_nodes(), 1.0);
    const Excitation src = make_source(cfg, mesh, grid);
    const StateHistory background = run_forward(frozen, src, mesh, grid);
    const JacobianMatrix kmat = assemble(background, tmpl, mesh, grid, kSigma);
    const SvdResult s = svd(kmat);

    auto f = open_out(out_dir + "/sv.csv");
    f << "k,sigma_k\n";
    for (std::size_t k = 0; k < s.singular_values.size(); ++k)
        f << (k + 1) << ',' << fmt(s.singular_values[k]) << '\n';
    write_meta_json(out_dir, cfg);
    return s.singular_values;
}

std::vector<std::array<double, 3>> alpha_sensitivity(const ExperimentConfig& cfg,
                                                     const std::vector<double>& alphas,
                                                     const std::string& out_dir) {
    if (alphas.empty()) throw std::invalid_argument("alpha_sensitivity: empty alpha list");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0))
            throw std::invalid_argument("alpha_sensitivity: alpha " + std::to_string(a) +
                                        " outside (0,1)");
    std::filesystem::create_directories(out_dir);
    std::vector<std::array<double, 3>> rows;
    const Mesh1D mesh = cfg.mesh();
    for (double a : alphas) {
        ExperimentConfig c = cfg;
        c.alpha = a;
        const ReconstructionResult r = run_case(c);
        CoeffField kap, slo;
        unstack(r.state.x, mesh, kap, slo);
        rows.push_back({a, field_error(kap, r.kappa_true, mesh, 0.3, 1.0),
                        field_error(slo, r.slowness_true, mesh, 0.0, 1.0)});
    }
    auto f = open_out(out_dir + "/alpha_sweep.csv");
    f << "alpha,err_kappa,err_slowness\n";
    for (const auto& r : rows) f << fmt(r[0]) << ',' << fmt(r[1]) << ',' << fmt(r[2]) << '\n';
    write_meta_json(out_dir, cfg);
    return rows;
}

void write_history_csv(const std::string& path, const StateHistory& h, const Mesh1D& mesh,
                       const TimeGrid& grid) {
    auto f = open_out(path);
    f << "t,x,u\n";
    for (int n = 0; n <= h.n_steps; ++n)
        for (int i = 0; i < h.n_nodes; ++i)
            f << fmt(grid.t(n)) << ',' << fmt(mesh.nodes[i]) << ',' << fmt(h.at(n, i)) << '\n';
}

void write_meta_json(const std::string& out_dir, const ExperimentConfig& cfg) {
    nlohmann::json j = nlohmann::json::parse(cfg.to_json());
    nlohmann::json meta;
    meta["config"] = j;
    meta["version"] = "fracwest 1.0.0";
    meta["kernel_backend"] = kernels::active_backend();
    meta["sigma"] = kSigma;
    auto f = open_out(out_dir + "/meta.json");
    f << meta.dump(2) << '\n';
}

} // namespace fracwest
