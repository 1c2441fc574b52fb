// Command-line harness: configuration-driven single runs, operator
// verification, potential checks, and the study suite.
//
// Exit codes: 0 success, 2 configuration/validation error, 3 solver abort,
// 4 I/O failure, 5 study-criterion failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <vch/config.hpp>
#include <vch/dynamics.hpp>
#include <vch/io.hpp>
#include <vch/operators.hpp>
#include <vch/potential.hpp>
#include <vch/studies.hpp>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolverAbort = 3;
constexpr int kExitIo = 4;
constexpr int kExitCriterion = 5;

struct GlobalArgs {
    std::string config_path;
    std::string out_override;
    int threads = 1;
    std::int64_t seed = -1; // negative: keep the config's seed
};

vch::RunConfig load_and_override(const GlobalArgs& ga) {
    if (ga.config_path.empty())
        throw vch::validation_error("this command needs --config <file>");
    vch::RunConfig cfg = vch::load_config(ga.config_path);
    if (!ga.out_override.empty()) cfg.output.directory = ga.out_override;
    if (ga.seed >= 0) cfg.initial.seed = static_cast<std::uint64_t>(ga.seed);
    return cfg;
}

void write_manifest(const fs::path& dir, const GlobalArgs& ga, const std::string& command) {
    std::ostringstream os;
    os << "vch-output 1\n";
    os << "command " << command << "\n";
    os << "field-format " << vch::kFieldFormatTag << "\n";
    os << "threads " << ga.threads << " (execution is sequential and deterministic)\n";
    if (ga.seed >= 0) os << "seed " << ga.seed << "\n";
    vch::write_text_file(dir / "manifest.txt", os.str());
}

void echo_config(const fs::path& dir, const GlobalArgs& ga) {
    // The echo is byte-for-byte the file that was parsed.
    vch::write_text_file(dir / "config.echo", vch::read_text_file(ga.config_path));
}

fs::path prepare_output(const vch::RunConfig& cfg, const GlobalArgs& ga,
                        const std::string& command) {
    fs::path dir = cfg.output.directory;
    vch::ensure_directory(dir);
    write_manifest(dir, ga, command);
    echo_config(dir, ga);
    return dir;
}

int cmd_run(const GlobalArgs& ga) {
    vch::RunConfig cfg = load_and_override(ga);
    fs::path dir = prepare_output(cfg, ga, "run");

    vch::Grid grid = vch::make_grid(cfg);
    vch::SpectralPlan plan(grid);
    vch::PotentialSpec pot = vch::make_potential(cfg);
    vch::InitialData init = vch::make_initial_data(cfg, grid);

    const bool explicit_path = cfg.params.lambda > 0.0;
    vch::Trajectory traj = explicit_path
                               ? vch::integrate_regularized(plan, pot, cfg.params, init,
                                                            cfg.output.save_stride)
                               : vch::run_system(plan, pot, cfg.params, init,
                                                 cfg.output.save_stride);

    if (cfg.output.write_ledger) vch::write_ledger_csv(dir / "ledger.csv", traj.ledger);
    if (cfg.output.write_fields) vch::write_trajectory_snapshots(dir / "fields", traj);

    const auto& last = traj.ledger.back();
    std::cout << "run complete: " << (explicit_path ? "regularized" : "implicit")
              << " path, " << traj.ledger.size() - 1 << " steps, " << traj.states.size()
              << " saved states\n";
    std::cout << "final t=" << last.t << " energy=" << last.energy
              << " dissipation=" << last.dissipation << " mass=" << last.mass_total << "\n";
    return kExitOk;
}

int cmd_verify_ops(const GlobalArgs& ga, const std::vector<std::size_t>& extents,
                   const std::vector<double>& spacing, int trials, double tol, bool tol_set) {
    std::vector<double> h = spacing;
    if (h.empty()) h.assign(extents.size(), 0.3);
    vch::Grid grid(extents, h);
    vch::SpectralPlan plan(grid);
    vch::VerificationReport rep = vch::verify_operator_identities(plan, trials);

    bool pass = rep.all_pass;
    if (tol_set) {
        pass = true;
        for (const auto& row : rep.rows) pass = pass && row.max_violation <= tol;
    }
    std::cout << rep.to_text();
    if (!ga.out_override.empty()) {
        vch::ensure_directory(ga.out_override);
        write_manifest(ga.out_override, ga, "verify-ops");
        vch::write_text_file(fs::path(ga.out_override) / "report.txt", rep.to_text());
    }
    return pass ? kExitOk : kExitCriterion;
}

int cmd_check_potential(const GlobalArgs& ga) {
    vch::RunConfig cfg = load_and_override(ga);
    fs::path dir = prepare_output(cfg, ga, "check-potential");

    vch::PotentialSpec pot = vch::make_potential(cfg);
    vch::ConditionReport rep = vch::check_conditions(pot);
    vch::write_text_file(dir / "report.txt", rep.to_text());
    std::cout << rep.to_text();
    if (!rep.all_pass) {
        for (const auto& e : rep.entries)
            if (!e.pass) {
                std::cerr << "failed condition: " << e.condition << "\n";
                break;
            }
        return kExitCriterion;
    }
    return kExitOk;
}

int cmd_study_beta(const GlobalArgs& ga) {
    vch::RunConfig cfg = load_and_override(ga);
    fs::path dir = prepare_output(cfg, ga, "study-beta");
    vch::Grid grid = vch::make_grid(cfg);
    vch::SpectralPlan plan(grid);
    vch::PotentialSpec pot = vch::make_potential(cfg);
    vch::InitialData init = vch::make_initial_data(cfg, grid);

    vch::BetaRateResult r = vch::study_beta_rate(plan, pot, cfg.params, init, cfg.study.betas,
                                                 cfg.output.save_stride, cfg.study.min_slope);

    std::vector<std::vector<double>> rows;
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : r.points) {
        rows.push_back({p.param, p.bundle.e_mu, p.bundle.e_phi, p.bundle.e_sigma_inf,
                        p.bundle.e_sigma_l2v, p.bundle.e_theta, p.bundle.total});
        pts.emplace_back(p.param, p.bundle.total);
    }
    vch::write_csv(dir / "summary.csv",
                   {"beta", "e_mu", "e_phi", "e_sigma_inf", "e_sigma_l2v", "e_theta", "total"},
                   rows);
    vch::write_plot_data(dir / "points.dat", pts);
    std::ostringstream os;
    os << "slope " << r.fit.slope << "\nintercept " << r.fit.intercept << "\ndecreasing "
       << (r.decreasing ? "yes" : "no") << "\nmin_slope " << cfg.study.min_slope << "\npass "
       << (r.pass ? "yes" : "no") << "\n";
    vch::write_text_file(dir / "study.txt", os.str());
    std::cout << os.str();
    return r.pass ? kExitOk : kExitCriterion;
}

int cmd_study_cauchy(const GlobalArgs& ga) {
    vch::RunConfig cfg = load_and_override(ga);
    fs::path dir = prepare_output(cfg, ga, "study-cauchy");
    vch::Grid grid = vch::make_grid(cfg);
    vch::SpectralPlan plan(grid);
    vch::PotentialSpec pot = vch::make_potential(cfg);
    vch::InitialData init = vch::make_initial_data(cfg, grid);

    vch::CauchyResult r = vch::study_beta_cauchy(plan, pot, cfg.params, init, cfg.study.betas,
                                                 cfg.output.save_stride, cfg.study.max_spread);

    std::vector<std::vector<double>> rows;
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : r.rows) {
        rows.push_back({row.beta, row.eta, row.diff.total, row.c_pair});
        pts.emplace_back(row.beta, row.c_pair);
    }
    vch::write_csv(dir / "summary.csv", {"beta", "eta", "difference", "pair_constant"}, rows);
    vch::write_plot_data(dir / "points.dat", pts);
    std::ostringstream os;
    os << "c_min " << r.c_min << "\nc_max " << r.c_max << "\nspread " << r.spread
       << "\nmax_spread " << cfg.study.max_spread << "\npass " << (r.pass ? "yes" : "no")
       << "\n";
    vch::write_text_file(dir / "study.txt", os.str());
    std::cout << os.str();
    return r.pass ? kExitOk : kExitCriterion;
}

int finish_schedule_outputs(const fs::path& dir, const vch::ScheduleStudyResult& r,
                            const char* param_name) {
    std::vector<std::vector<double>> rows;
    for (const auto& p : r.points) rows.push_back({p.first, p.second});
    vch::write_csv(dir / "summary.csv", {param_name, "windowed_distance"}, rows);
    vch::write_plot_data(dir / "points.dat", r.points);
    std::ostringstream os;
    if (r.fit_valid) os << "slope " << r.fit.slope << "\nintercept " << r.fit.intercept << "\n";
    os << "decreasing " << (r.decreasing ? "yes" : "no") << "\npass "
       << (r.pass ? "yes" : "no") << "\n";
    vch::write_text_file(dir / "study.txt", os.str());
    std::cout << os.str();
    return r.pass ? kExitOk : kExitCriterion;
}

int cmd_study_lambda(const GlobalArgs& ga) {
    vch::RunConfig cfg = load_and_override(ga);
    fs::path dir = prepare_output(cfg, ga, "study-lambda");
    vch::Grid grid = vch::make_grid(cfg);
    vch::SpectralPlan plan(grid);
    vch::PotentialSpec pot = vch::make_potential(cfg);
    vch::InitialData init = vch::make_initial_data(cfg, grid);
    vch::ObservationWindow w = vch::make_window(cfg, grid);
    vch::ScheduleStudyResult r = vch::study_lambda(plan, pot, cfg.params, init,
                                                   cfg.study.lambdas, w,
                                                   cfg.output.save_stride);
    return finish_schedule_outputs(dir, r, "lambda");
}

int cmd_study_epsilon(const GlobalArgs& ga) {
    vch::RunConfig cfg = load_and_override(ga);
    fs::path dir = prepare_output(cfg, ga, "study-epsilon");
    vch::Grid grid = vch::make_grid(cfg);
    vch::SpectralPlan plan(grid);
    vch::PotentialSpec pot = vch::make_potential(cfg);
    vch::InitialData init = vch::make_initial_data(cfg, grid);
    vch::ObservationWindow w = vch::make_window(cfg, grid);
    vch::ScheduleStudyResult r = vch::study_epsilon(plan, pot, cfg.params, init,
                                                    cfg.study.epsilons, w,
                                                    cfg.output.save_stride);
    return finish_schedule_outputs(dir, r, "epsilon");
}

int cmd_study_domain(const GlobalArgs& ga) {
    vch::RunConfig cfg = load_and_override(ga);
    fs::path dir = prepare_output(cfg, ga, "study-domain");
    if (cfg.grid.extents.size() != 1)
        throw vch::validation_error("study-domain: needs a one-dimensional grid section");
    if (cfg.initial.kind != vch::InitialKind::gaussian_bump)
        throw vch::validation_error(
            "study-domain: needs initial.kind = gaussian-bump (data must be supported "
            "inside the window)");

    const double h = cfg.grid.spacing[0];
    const std::size_t n1 = cfg.grid.extents[0];
    const double length = static_cast<double>(n1 - 1) * h;
    const double c = cfg.initial.center * length;
    const double w2 = cfg.initial.width * cfg.initial.width;
    auto bump = [c, w2](double amp) {
        return [amp, c, w2](const std::array<double, 3>& x) {
            const double d = x[0] - c;
            return amp * std::exp(-d * d / w2);
        };
    };

    vch::Grid smallest({n1}, {h});
    vch::ObservationWindow w = vch::make_window(cfg, smallest);
    vch::TruncationResult r = vch::study_domain_truncation(
        vch::make_potential(cfg), cfg.params, h, n1, cfg.study.doublings, w,
        bump(cfg.initial.mu), bump(cfg.initial.phi), bump(cfg.initial.sigma),
        cfg.initial.smoothing_eps);

    std::vector<std::vector<double>> rows;
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : r.rows) {
        rows.push_back({row.length, row.difference});
        pts.emplace_back(row.length, row.difference);
    }
    vch::write_csv(dir / "summary.csv", {"length", "windowed_difference"}, rows);
    vch::write_plot_data(dir / "points.dat", pts);
    std::ostringstream os;
    os << "lengths";
    for (double L : r.lengths) os << " " << L;
    os << "\npass " << (r.pass ? "yes" : "no") << "\n";
    vch::write_text_file(dir / "study.txt", os.str());
    std::cout << os.str();
    return r.pass ? kExitOk : kExitCriterion;
}

int cmd_study_contraction(const GlobalArgs& ga) {
    vch::RunConfig cfg = load_and_override(ga);
    fs::path dir = prepare_output(cfg, ga, "study-contraction");
    vch::Grid grid = vch::make_grid(cfg);
    vch::SpectralPlan plan(grid);
    vch::PotentialSpec pot = vch::make_potential(cfg);
    vch::InitialData init = vch::make_initial_data(cfg, grid);

    // Fixed smooth perturbation directions spanning all three components.
    const double L = grid.length(0);
    vch::Field dmu = vch::Field::from_function(grid, [L](const std::array<double, 3>& x) {
        return std::cos(M_PI * x[0] / L);
    });
    vch::Field dphi = vch::Field::from_function(grid, [L](const std::array<double, 3>& x) {
        return 0.5 * std::cos(2.0 * M_PI * x[0] / L);
    });
    vch::Field dsig = vch::Field::from_function(grid, [L](const std::array<double, 3>& x) {
        return 0.3 * std::cos(M_PI * x[0] / L);
    });

    vch::ContractionResult r =
        vch::study_contraction(plan, pot, cfg.params, init, dmu, dphi, dsig,
                               cfg.study.deltas, 0, cfg.study.max_ratio_spread);

    std::vector<std::vector<double>> rows;
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : r.rows) {
        rows.push_back({row.delta, row.final_metric, row.ratio});
        pts.emplace_back(row.delta, row.final_metric);
    }
    vch::write_csv(dir / "summary.csv", {"delta", "final_metric", "ratio"}, rows);
    vch::write_plot_data(dir / "points.dat", pts);
    std::ostringstream os;
    os << "spread " << r.spread << "\nmax_ratio_spread " << cfg.study.max_ratio_spread
       << "\npass " << (r.pass ? "yes" : "no") << "\n";
    vch::write_text_file(dir / "study.txt", os.str());
    std::cout << os.str();
    return r.pass ? kExitOk : kExitCriterion;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase-field tumor-growth system: runs, checks and studies"};
    app.require_subcommand(1);

    GlobalArgs ga;
    app.add_option("--config", ga.config_path, "configuration file (structured text)");
    app.add_option("--out", ga.out_override, "output directory (overrides the config)");
    app.add_option("--threads", ga.threads, "worker threads (results are identical for any value)")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", ga.seed, "override initial.seed for random-seeded data")
        ->check(CLI::NonNegativeNumber);

    CLI::App* run = app.add_subcommand("run", "integrate one configuration and save outputs");
    CLI::App* verify = app.add_subcommand("verify-ops", "operator identity verification");
    std::vector<std::size_t> v_extents = {16};
    std::vector<double> v_spacing;
    int v_trials = 100;
    double v_tol = 0.0;
    CLI::Option* v_tol_opt =
        verify->add_option("--tol", v_tol, "uniform tolerance for all identities");
    verify->add_option("--extents", v_extents, "grid extents (1-3 axes)")->expected(1, 3);
    verify->add_option("--spacing", v_spacing, "grid spacings (default 0.3 per axis)")
        ->expected(1, 3);
    verify->add_option("--trials", v_trials, "random trials")->check(CLI::PositiveNumber);
    CLI::App* checkp = app.add_subcommand("check-potential", "structural potential checks");
    CLI::App* sbeta = app.add_subcommand("study-beta", "viscosity rate study");
    CLI::App* scauchy = app.add_subcommand("study-cauchy", "viscosity pair-constant study");
    CLI::App* slambda = app.add_subcommand("study-lambda", "operator regularization study");
    CLI::App* seps = app.add_subcommand("study-epsilon", "graph regularization study");
    CLI::App* sdomain = app.add_subcommand("study-domain", "domain truncation study");
    CLI::App* scontr = app.add_subcommand("study-contraction", "perturbation scaling study");
    for (CLI::App* s : {run, verify, checkp, sbeta, scauchy, slambda, seps, sdomain, scontr})
        s->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(ga);
        if (verify->parsed())
            return cmd_verify_ops(ga, v_extents, v_spacing, v_trials, v_tol,
                                  v_tol_opt->count() > 0);
        if (checkp->parsed()) return cmd_check_potential(ga);
        if (sbeta->parsed()) return cmd_study_beta(ga);
        if (scauchy->parsed()) return cmd_study_cauchy(ga);
        if (slambda->parsed()) return cmd_study_lambda(ga);
        if (seps->parsed()) return cmd_study_epsilon(ga);
        if (sdomain->parsed()) return cmd_study_domain(ga);
        if (scontr->parsed()) return cmd_study_contraction(ga);
    } catch (const vch::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const vch::solver_abort& e) {
        std::cerr << "solver abort: " << e.what() << "\n";
        return kExitSolverAbort;
    } catch (const vch::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitValidation;
}
