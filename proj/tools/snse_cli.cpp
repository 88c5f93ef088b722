#include "snse/action.hpp"
#include "snse/config.hpp"
#include "snse/dynamics.hpp"
#include "snse/exit.hpp"
#include "snse/functionals.hpp"
#include "snse/io.hpp"
#include "snse/noise.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace {

constexpr const char* kVersion = "snse 1.0.0";

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct Instruments {
    std::shared_ptr<const snse::GridSpec> grid;
    std::unique_ptr<snse::NoiseOperator> op;
    snse::SdeParams params;
    snse::Domain domain;
};

Instruments build(const snse::RunConfig& cfg) {
    Instruments ins;
    ins.grid = snse::make_grid_ptr(cfg.dim, cfg.points_per_axis, cfg.box_length);
    ins.op = std::make_unique<snse::NoiseOperator>(ins.grid, cfg.profile(),
                                                   cfg.real_valued_output);
    ins.params = cfg.sde_params();
    ins.domain.kind = cfg.domain();
    ins.domain.radius = cfg.radius;
    ins.domain.lambda = cfg.lambda;
    if (ins.domain.kind == snse::DomainKind::htilde_sublevel) {
        snse::Spectral sp(ins.grid);
        const double C = snse::gn_constant(cfg.sigma, cfg.dim, sp);
        ins.domain.consts = snse::paper_constants(cfg.sigma, cfg.dim, C);
    }
    return ins;
}

void emit_manifest(const std::string& out_dir, const snse::RunConfig& cfg) {
    std::filesystem::create_directories(out_dir);
    snse::write_manifest(out_dir + "/manifest.json",
                         snse::serialize_config(cfg), kVersion);
}

int cmd_simulate(const snse::RunConfig& cfg, const std::string& initial) {
    Instruments ins = build(cfg);
    snse::Field u0(ins.grid);
    if (!initial.empty()) {
        u0 = snse::read_field_file(initial);
        if (!(*u0.grid == *ins.grid))
            throw std::runtime_error("initial snapshot grid mismatch");
    }
    snse::RunOptions opts;
    opts.snapshot_stride = cfg.snapshot_stride;
    snse::Trajectory traj;
    if (ins.params.noise_kind == snse::NoiseKind::none)
        traj = snse::det_flow(u0, ins.params, cfg.horizon, opts);
    else
        traj = snse::solve_sde(u0, ins.params, *ins.op, cfg.horizon, cfg.seed,
                               0, opts);
    emit_manifest(cfg.out_dir, cfg);
    snse::write_scalar_jsonl(cfg.out_dir + "/scalars.jsonl", traj);
    if (cfg.snapshot_stride > 0)
        snse::write_field_sequence(cfg.out_dir + "/snapshots.snsf",
                                   traj.snapshots);
    std::cout << "simulate: " << traj.scalars.size() << " steps, final mass "
              << traj.scalars.back().mass << "\n";
    return 0;
}

int cmd_exit_mc(const snse::RunConfig& cfg) {
    Instruments ins = build(cfg);
    if (ins.params.noise_kind == snse::NoiseKind::multiplicative &&
        ins.domain.kind == snse::DomainKind::l2_ball)
        std::cerr << "warning: exit impossible: mass nonincreasing under "
                     "multiplicative noise in an L2 ball\n";
    std::vector<double> epsilons =
        cfg.epsilon_list.empty() ? std::vector<double>{cfg.epsilon}
                                 : cfg.epsilon_list;
    snse::Field u0(ins.grid);
    emit_manifest(cfg.out_dir, cfg);
    std::ofstream csv(cfg.out_dir + "/summary.csv");
    csv << "epsilon,n,censored,mean_tau,ci95,laplace,predicted_laplace,z\n";
    std::ofstream recs(cfg.out_dir + "/records.jsonl");
    std::uint64_t seed = cfg.seed;
    const double hs0 = ins.op->hs_norm_l2();
    for (double eps : epsilons) {
        snse::SdeParams p = ins.params;
        p.epsilon = eps;
        auto res = snse::mc_exit_ensemble(u0, p, *ins.op, ins.domain,
                                          cfg.paths, cfg.t_max, seed);
        seed += 0x9E3779B97F4A7C15ULL;
        const double cens_frac =
            static_cast<double>(res.stats.censored_count) /
            static_cast<double>(res.stats.n_paths);
        if (cens_frac > 0.05)
            std::cerr << "warning: censoring " << 100.0 * cens_frac
                      << "% at epsilon " << eps
                      << " biases mean tau downward\n";
        auto lap = snse::laplace_identity_check(
            res.stats, p.alpha, ins.domain.radius * ins.domain.radius, eps,
            hs0);
        csv.precision(12);
        csv << eps << "," << res.stats.n_paths << ","
            << res.stats.censored_count << "," << res.stats.mean_tau << ","
            << res.stats.tau_ci95 << "," << res.stats.laplace_estimate << ","
            << lap.predicted << "," << lap.z << "\n";
        recs.precision(17);
        for (const auto& r : res.records) {
            nlohmann::json jr = {{"epsilon", eps},
                                 {"tau", r.tau},
                                 {"exited", r.exited},
                                 {"mass_at_exit", r.mass_at_exit},
                                 {"htilde_at_exit", r.htilde_at_exit},
                                 {"sector", r.sector},
                                 {"seed", r.seed}};
            recs << jr.dump() << "\n";
        }
        std::cout << "epsilon " << eps << ": mean tau " << res.stats.mean_tau
                  << " (censored " << res.stats.censored_count << "/"
                  << res.stats.n_paths << ")\n";
    }
    return 0;
}

int cmd_instanton(const snse::RunConfig& cfg, const std::vector<int>& sectors) {
    Instruments ins = build(cfg);
    snse::Field u0(ins.grid);
    auto rep = snse::quasipotential_report(u0, ins.params, *ins.op, ins.domain,
                                           cfg.T_list, sectors);
    emit_manifest(cfg.out_dir, cfg);
    nlohmann::json table = nlohmann::json::array();
    for (const auto& c : rep.cells) {
        nlohmann::json jc = {{"T", c.T},
                             {"action", c.action_value},
                             {"converged", c.converged},
                             {"rho", c.rho}};
        if (c.sector != INT_MIN) jc["sector"] = c.sector;
        table.push_back(jc);
    }
    nlohmann::json out = {{"cells", table},
                          {"e_bar", rep.e_bar},
                          {"lower_bound", rep.lower_bound}};
    std::ofstream os(cfg.out_dir + "/instanton.json");
    os << out.dump(2) << "\n";

    // write the best control path in the binary snapshot format
    snse::MinimizeOptions mo;
    mo.T = cfg.T_list.empty() ? 1.0 : cfg.T_list.front();
    for (double T : cfg.T_list) mo.T = T;  // last T (longest horizon)
    auto best = snse::minimize_action(u0, ins.params, *ins.op, ins.domain, mo);
    snse::write_field_sequence(cfg.out_dir + "/control.snsf",
                               best.control.controls);
    std::cout << "instanton: e_bar " << rep.e_bar << ", lower bound "
              << rep.lower_bound << "\n";
    return 0;
}

int cmd_constants(const snse::RunConfig& cfg) {
    Instruments ins = build(cfg);
    snse::Spectral sp(ins.grid);
    const double C = snse::gn_constant(cfg.sigma, cfg.dim, sp);
    auto pc = snse::paper_constants(cfg.sigma, cfg.dim, C);
    nlohmann::json j;
    j["hs_norm_l2"] = ins.op->hs_norm_l2();
    j["hs_norm_h1"] = ins.op->hs_norm_h1();
    j["operator_norm_l2"] = ins.op->operator_norm_l2();
    j["f_phi"] = ins.op->f_phi_value();
    j["gn_constant_C"] = pc.gn_constant_C;
    j["beta"] = pc.beta;
    j["c_sigma"] = pc.c_sigma;
    j["m_sigma_d"] = pc.m_sigma_d;
    j["mass_exponent"] = pc.mass_exponent;
    nlohmann::json btab = nlohmann::json::array();
    nlohmann::json ttab = nlohmann::json::array();
    for (double rho : {0.25, 0.5, 1.0, 2.0}) {
        btab.push_back({{"rho", rho}, {"b", snse::b_rho(rho, pc)}});
        for (double L : {1.0, 10.0})
            ttab.push_back(
                {{"rho", rho},
                 {"L", L},
                 {"T_l2", snse::t_l_rho_l2(rho, L, ins.op->hs_norm_l2())}});
    }
    j["b_table"] = btab;
    j["T_table_l2"] = ttab;
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

int cmd_verify(const snse::RunConfig& cfg) {
    std::vector<Check> checks;
    auto push = [&](const std::string& name, bool ok,
                    const std::string& detail) {
        checks.push_back({name, ok, detail});
    };

    auto grid = snse::make_grid_ptr(1, 64, 20.0 * std::numbers::pi);
    snse::Spectral sp(grid);
    snse::GaussianStream rng(cfg.seed, 7);

    // deterministic mass decay
    {
        snse::Field u0(grid);
        for (std::size_t i = 0; i < u0.size(); ++i) {
            const double x = grid->coordinate(static_cast<int>(i)) -
                             0.5 * grid->box_length();
            u0.values[i] = snse::cplx{std::exp(-0.5 * x * x), 0.2};
        }
        snse::SdeParams p;
        p.lambda = 1;
        p.alpha = 0.3;
        p.dt = 1e-3;
        auto traj = snse::det_flow(u0, p, 1.0);
        double worst = 0.0;
        const double n0 = traj.scalars.front().mass;
        for (const auto& r : traj.scalars)
            worst = std::max(worst, std::abs(r.mass -
                                             n0 * std::exp(-2.0 * p.alpha *
                                                           r.t)) /
                                        n0);
        std::ostringstream d;
        d << "max rel err " << worst;
        push("deterministic_mass_decay", worst < 1e-8, d.str());
    }

    // multiplicative pathwise mass law
    {
        snse::NoiseOperator op(grid, snse::GaussianCutoff{2.0}, true);
        snse::SdeParams p;
        p.alpha = 0.2;
        p.epsilon = 0.1;
        p.dt = 2e-3;
        p.noise_kind = snse::NoiseKind::multiplicative;
        snse::Field u0(grid);
        for (std::size_t i = 0; i < u0.size(); ++i) {
            const double x = grid->coordinate(static_cast<int>(i)) -
                             0.5 * grid->box_length();
            u0.values[i] = snse::cplx{std::exp(-x * x), 0.0};
        }
        auto traj = snse::solve_sde(u0, p, op, 1.0, cfg.seed, 3);
        double worst = 0.0;
        const double n0 = traj.scalars.front().mass;
        for (const auto& r : traj.scalars)
            worst = std::max(
                worst,
                std::abs(r.mass * std::exp(2.0 * p.alpha * r.t) / n0 - 1.0));
        std::ostringstream d;
        d << "max deviation " << worst;
        push("multiplicative_mass_law", worst < 1e-10, d.str());
    }

    // noise increment variance
    {
        snse::NoiseOperator op(grid, snse::GaussianCutoff{2.0}, false);
        const double dt = 0.01;
        const int n = 2000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            auto inc = op.sample_increment(dt, rng, 1000 + i);
            const double m = snse::mass(inc);
            s += m;
            s2 += m * m;
        }
        const double mean = s / n;
        const double se = std::sqrt((s2 - s * s / n) / (n - 1) / n);
        const double target = dt * op.hs_norm_l2() * op.hs_norm_l2();
        std::ostringstream d;
        d << "mean " << mean << " target " << target << " se " << se;
        push("noise_increment_variance", std::abs(mean - target) < 3 * se,
             d.str());
    }

    // sandwich inequalities on random fields
    {
        const double C = snse::gn_constant(1.0, 1, sp);
        auto pc = snse::paper_constants(1.0, 1, C);
        int violations = 0;
        for (int t = 0; t < 100; ++t) {
            snse::Field u(grid);
            for (std::size_t i = 0; i < u.size(); ++i)
                u.values[i] = snse::cplx{rng.normal(t, 2 * i),
                                         rng.normal(t, 2 * i + 1)} *
                              0.3;
            const double g = snse::gradient_l2(sp, u);
            const double n2 = snse::l2_norm(u);
            const double me = std::pow(n2, pc.mass_exponent);
            const double htf = snse::modified_hamiltonian(sp, u, pc, 1);
            const double htd = snse::modified_hamiltonian(sp, u, pc, -1);
            if (!(0.25 * g * g + C * me <= htf + 1e-9 &&
                  htf <= 0.5 * g * g + pc.beta * C * me + 1e-9))
                ++violations;
            if (!(0.5 * g * g + pc.beta * C * me <= htd + 1e-9 &&
                  htd <= 0.75 * g * g + (pc.beta + 1.0) * C * me + 1e-9))
                ++violations;
        }
        std::ostringstream d;
        d << violations << " violations";
        push("sandwich_inequalities", violations == 0, d.str());
    }

    // adjoint gradient check
    {
        auto small = snse::make_grid_ptr(1, 16, 2.0 * std::numbers::pi);
        snse::NoiseOperator op(small, snse::SharpCutoff{100.0}, false);
        snse::SdeParams p;
        p.lambda = 1;
        p.alpha = 0.1;
        p.dt = 1e-2;
        p.noise_kind = snse::NoiseKind::additive;
        snse::Field u0(small);
        snse::ControlPath h;
        h.dt = p.dt;
        h.controls.assign(20, snse::Field(small));
        snse::GaussianStream crng(cfg.seed, 11);
        for (std::size_t n = 0; n < h.controls.size(); ++n)
            for (std::size_t i = 0; i < h.controls[n].values.size(); ++i)
                h.controls[n].values[i] =
                    0.3 * snse::cplx{crng.normal(n, 2 * i),
                                     crng.normal(n, 2 * i + 1)};
        snse::Domain dom;
        dom.kind = snse::DomainKind::l2_ball;
        dom.radius = 1.0;
        auto rep =
            snse::gradient_check(u0, h, p, op, dom, 10.0, 5, cfg.seed + 1);
        std::ostringstream d;
        d << "max rel err " << rep.max_rel_error;
        push("adjoint_gradient", rep.max_rel_error < 1e-5, d.str());
    }

    bool all = true;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << c.detail
                  << ")\n";
        all = all && c.pass;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for the weakly damped stochastic "
                 "nonlinear Schrodinger equation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string config_path, initial, out_override, domain_override;
    std::vector<double> eps_override;
    std::vector<double> tlist_override;
    std::vector<int> sectors = {0, 1, -1, 2, -2};
    long long paths_override = -1;
    double tmax_override = -1.0;
    long long seed_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file (JSON)")
            ->required();
        sub->add_option("--out", out_override, "output directory");
        sub->add_option("--seed", seed_override, "master seed override");
    };

    auto* sim = app.add_subcommand("simulate", "integrate one trajectory");
    add_common(sim);
    sim->add_option("--initial", initial, "initial state snapshot file");

    auto* emc = app.add_subcommand("exit-mc", "first-exit Monte Carlo");
    add_common(emc);
    emc->add_option("--domain", domain_override,
                    "domain kind (l2_ball|h1_ball|htilde_sublevel)");
    emc->add_option("--epsilon-list", eps_override, "epsilon grid");
    emc->add_option("--paths", paths_override, "paths per epsilon");
    emc->add_option("--tmax", tmax_override, "censoring horizon");

    auto* ins = app.add_subcommand("instanton", "minimum action paths");
    add_common(ins);
    ins->add_option("--T-list", tlist_override, "horizons");
    ins->add_option("--sectors", sectors, "boundary sectors (mode indices)");

    auto* con = app.add_subcommand("constants", "print constants report");
    add_common(con);

    auto* ver = app.add_subcommand("verify", "run the invariant suite");
    add_common(ver);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        snse::RunConfig cfg = snse::parse_config(read_file(config_path));
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (!domain_override.empty()) cfg.domain_kind = domain_override;
        if (!eps_override.empty()) cfg.epsilon_list = eps_override;
        if (paths_override > 0)
            cfg.paths = static_cast<std::size_t>(paths_override);
        if (tmax_override > 0) cfg.t_max = tmax_override;
        if (seed_override >= 0)
            cfg.seed = static_cast<std::uint64_t>(seed_override);
        if (!tlist_override.empty()) cfg.T_list = tlist_override;

        if (app.got_subcommand(sim)) return cmd_simulate(cfg, initial);
        if (app.got_subcommand(emc)) return cmd_exit_mc(cfg);
        if (app.got_subcommand(ins)) return cmd_instanton(cfg, sectors);
        if (app.got_subcommand(con)) return cmd_constants(cfg);
        if (app.got_subcommand(ver)) return cmd_verify(cfg);
    } catch (const snse::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
