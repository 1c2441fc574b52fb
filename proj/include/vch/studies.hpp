#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <utility>
#include <vector>

#include "dynamics.hpp"

namespace vch {

// --- trajectory distance bookkeeping ------------------------------------------

// Norm bundle for the distance between two trajectories sampled on the same
// time grid: space-time L2 norms by trapezoidal quadrature over the saved
// steps, sup norms as the max over saved steps, and the conserved-combination
// distance measured in the dual norm.
struct ErrorBundle {
    double e_mu = 0.0;        // L2-in-time H distance of mu
    double e_phi = 0.0;       // L2-in-time V distance of phi
    double e_sigma_inf = 0.0; // sup-in-time H distance of sigma
    double e_sigma_l2v = 0.0; // L2-in-time V distance of sigma
    double e_theta = 0.0;     // sup-in-time dual-norm distance of alpha*mu+phi+sigma
    double total = 0.0;
};

namespace detail {

inline void require_aligned(const Trajectory& a, const Trajectory& b) {
    if (a.states.empty() || b.states.empty())
        throw validation_error("trajectory comparison: empty trajectory");
    if (a.times.size() != b.times.size())
        throw validation_error("trajectory comparison: different numbers of saved states");
    for (std::size_t k = 0; k < a.times.size(); ++k)
        if (std::abs(a.times[k] - b.times[k]) > 1e-12 * (1.0 + std::abs(a.times[k])))
            throw validation_error("trajectory comparison: saved times do not line up");
    require_same_grid(a.states.front().mu, b.states.front().mu, "trajectory comparison");
}

// trapezoidal integral of a per-sample series over the saved times
inline double trapezoid(const std::vector<double>& t, const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k)
        s += 0.5 * (t[k + 1] - t[k]) * (g[k] + g[k + 1]);
    return s;
}

} // namespace detail

inline ErrorBundle error_bundle(const SpectralPlan& plan, double alpha, const Trajectory& a,
                                const Trajectory& b) {
    detail::require_aligned(a, b);
    const std::size_t m = a.times.size();
    std::vector<double> mu_sq(m), phi_sq(m), sig_sq(m), sigv_sq(m);
    ErrorBundle e;
    for (std::size_t k = 0; k < m; ++k) {
        const State& sa = a.states[k];
        const State& sb = b.states[k];
        Field dmu = sa.mu - sb.mu;
        Field dphi = sa.phi - sb.phi;
        Field dsig = sa.sigma - sb.sigma;
        mu_sq[k] = inner_h(dmu, dmu);
        const double phv = norm_v(dphi);
        phi_sq[k] = phv * phv;
        sig_sq[k] = inner_h(dsig, dsig);
        const double sgv = norm_v(dsig);
        sigv_sq[k] = sgv * sgv;
        e.e_sigma_inf = std::max(e.e_sigma_inf, std::sqrt(sig_sq[k]));
        Field theta(dmu.grid);
        for (std::size_t i = 0; i < theta.size(); ++i)
            theta.v[i] = alpha * dmu.v[i] + dphi.v[i] + dsig.v[i];
        e.e_theta = std::max(e.e_theta, dual_norm(plan, theta));
    }
    e.e_mu = std::sqrt(detail::trapezoid(a.times, mu_sq));
    e.e_phi = std::sqrt(detail::trapezoid(a.times, phi_sq));
    e.e_sigma_l2v = std::sqrt(detail::trapezoid(a.times, sigv_sq));
    e.total = e.e_mu + e.e_phi + e.e_sigma_inf + e.e_sigma_l2v + e.e_theta;
    return e;
}

// --- log-log least squares -----------------------------------------------------

struct RateFit {
    std::vector<std::pair<double, double>> points; // (parameter, error)
    double slope = 0.0;
    double intercept = 0.0; // log10 of the fitted constant
};

inline RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw validation_error("rate fit: needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [p, err] : points) {
        if (!(p > 0.0) || !(err > 0.0))
            throw validation_error("rate fit: parameters and errors must be positive");
        const double x = std::log10(p), y = std::log10(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(points.size());
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 1e-30)) throw validation_error("rate fit: degenerate abscissae");
    RateFit f;
    f.points = points;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

inline bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (!(v[i + 1] < v[i])) return false;
    return true;
}

// --- windowed comparison --------------------------------------------------------

// Axis-aligned sub-box used for comparisons that must ignore boundary effects.
// A window is validated against the grid it observes: strictly inside with a
// margin of at least 10% of the domain length on every side.
struct ObservationWindow {
    std::vector<std::pair<double, double>> bounds; // per axis (lo, hi)

    void validate_for(const Grid& g) const {
        if (static_cast<int>(bounds.size()) != g.dims())
            throw validation_error("window: one (lo,hi) pair per grid axis required");
        for (int a = 0; a < g.dims(); ++a) {
            const auto [lo, hi] = bounds[a];
            if (!(lo < hi)) throw validation_error("window: bounds must satisfy lo < hi");
            const double left = g.origin(a), right = g.origin(a) + g.length(a);
            const double margin = 0.1 * g.length(a);
            if (!(lo >= left + margin && hi <= right - margin))
                throw validation_error(
                    "window: must sit inside the domain with a 10% margin per side");
        }
    }

    bool contains(const Grid& g, std::size_t flat) const {
        const auto x = g.point(flat);
        for (int a = 0; a < g.dims(); ++a)
            if (x[a] < bounds[a].first || x[a] > bounds[a].second) return false;
        return true;
    }
};

// H-style distance restricted to the window for two fields on one grid.
inline double windowed_h_distance(const Field& a, const Field& b, const ObservationWindow& w) {
    require_same_grid(a, b, "windowed distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (w.contains(a.grid, i)) {
            const double d = a.v[i] - b.v[i];
            s += a.grid.weight(i) * d * d;
        }
    return std::sqrt(s);
}

// The same distance for fields on different grids sharing spacing and origin
// alignment; window nodes must exist on both grids.
inline double windowed_h_distance_cross(const Field& a, const Field& b,
                                        const ObservationWindow& w) {
    const Grid& ga = a.grid;
    const Grid& gb = b.grid;
    if (ga.dims() != gb.dims())
        throw validation_error("windowed distance: grids of different rank");
    for (int ax = 0; ax < ga.dims(); ++ax)
        if (std::abs(ga.spacing(ax) - gb.spacing(ax)) > 1e-12 * ga.spacing(ax))
            throw validation_error("windowed distance: grids must share spacing");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!w.contains(ga, i)) continue;
        const auto x = ga.point(i);
        std::size_t flat_b = 0;
        for (int ax = 0; ax < ga.dims(); ++ax) {
            const double pos = (x[ax] - gb.origin(ax)) / gb.spacing(ax);
            const auto j = static_cast<std::size_t>(std::llround(pos));
            if (std::abs(pos - static_cast<double>(j)) > 1e-9 || j >= gb.extent(ax))
                throw validation_error("windowed distance: window node missing on second grid");
            flat_b += j * gb.stride(ax);
        }
        double wgt = 1.0;
        for (int ax = 0; ax < ga.dims(); ++ax) wgt *= ga.spacing(ax);
        const double d = a.v[i] - b.v[flat_b];
        s += wgt * d * d;
    }
    return std::sqrt(s);
}

// --- vanishing-viscosity rate study --------------------------------------------

struct RatePoint {
    double param = 0.0;
    ErrorBundle bundle;
};

struct BetaRateResult {
    std::vector<RatePoint> points; // in schedule order (decreasing beta)
    RateFit fit;
    bool decreasing = false;
    bool pass = false;
};

// Runs the limit configuration (beta = 0) once, then the viscous runs over the
// beta schedule, and fits total distance against beta in log-log coordinates.
// Passing means fitted slope >= min_slope and totals strictly decreasing.
inline BetaRateResult study_beta_rate(const SpectralPlan& plan, const PotentialSpec& pot,
                                      const SystemParams& base, const InitialData& init,
                                      const std::vector<double>& betas,
                                      std::size_t save_stride = 1, double min_slope = 0.45) {
    if (betas.size() < 4)
        throw validation_error("beta study: schedule needs at least four values");
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0)) throw validation_error("beta study: betas must be positive");
        if (i > 0 && !(betas[i] < betas[i - 1]))
            throw validation_error("beta study: schedule must decrease strictly");
    }
    SystemParams ref_params = base;
    ref_params.beta = 0.0;
    Trajectory ref = run_system(plan, pot, ref_params, init, save_stride);

    BetaRateResult out;
    std::vector<std::pair<double, double>> fit_points;
    const double floor = 1e-12;
    for (double beta : betas) {
        SystemParams prm = base;
        prm.beta = beta;
        Trajectory t = run_system(plan, pot, prm, init, save_stride);
        RatePoint pt;
        pt.param = beta;
        pt.bundle = error_bundle(plan, base.alpha, t, ref);
        if (!(pt.bundle.total > floor))
            throw validation_error("beta study: distance at quadrature floor; fit degenerate");
        fit_points.emplace_back(beta, pt.bundle.total);
        out.points.push_back(std::move(pt));
    }
    out.fit = fit_rate(fit_points);
    std::vector<double> totals;
    for (const auto& p : out.points) totals.push_back(p.bundle.total);
    out.decreasing = strictly_decreasing(totals);
    out.pass = out.decreasing && out.fit.slope >= min_slope;
    return out;
}

// --- viscosity Cauchy-difference study ------------------------------------------

struct CauchyRow {
    double beta = 0.0, eta = 0.0;
    ErrorBundle diff;
    double c_pair = 0.0; // diff.total / (sqrt(beta) + sqrt(eta))
};

struct CauchyResult {
    std::vector<CauchyRow> rows;
    double c_min = 0.0, c_max = 0.0, spread = 0.0;
    bool pass = false;
};

// Consecutive pairs of the beta schedule; the pair constants
// diff/(sqrt(beta)+sqrt(eta)) must all agree within the given spread factor.
inline CauchyResult study_beta_cauchy(const SpectralPlan& plan, const PotentialSpec& pot,
                                      const SystemParams& base, const InitialData& init,
                                      const std::vector<double>& betas,
                                      std::size_t save_stride = 1, double max_spread = 2.0) {
    if (betas.size() < 3)
        throw validation_error("cauchy study: schedule needs at least three values");
    std::vector<Trajectory> runs;
    runs.reserve(betas.size());
    for (double beta : betas) {
        if (!(beta > 0.0)) throw validation_error("cauchy study: betas must be positive");
        SystemParams prm = base;
        prm.beta = beta;
        runs.push_back(run_system(plan, pot, prm, init, save_stride));
    }
    CauchyResult out;
    for (std::size_t k = 0; k + 1 < betas.size(); ++k) {
        CauchyRow row;
        row.beta = betas[k];
        row.eta = betas[k + 1];
        row.diff = error_bundle(plan, base.alpha, runs[k], runs[k + 1]);
        row.c_pair = row.diff.total / (std::sqrt(row.beta) + std::sqrt(row.eta));
        out.rows.push_back(row);
    }
    out.c_min = out.c_max = out.rows.front().c_pair;
    for (const auto& r : out.rows) {
        out.c_min = std::min(out.c_min, r.c_pair);
        out.c_max = std::max(out.c_max, r.c_pair);
    }
    out.spread = out.c_max / out.c_min;
    out.pass = out.spread < max_spread;
    return out;
}

// --- operator/graph regularization consistency ------------------------------------

struct ScheduleStudyResult {
    std::vector<std::pair<double, double>> points; // (parameter, windowed distance at T)
    RateFit fit;
    bool fit_valid = false; // false when a distance sits at zero (fit impossible)
    bool decreasing = false;
    bool pass = false;
};

namespace detail {

inline void finish_schedule_study(ScheduleStudyResult& out) {
    bool all_positive = true;
    std::vector<double> d;
    for (const auto& p : out.points) {
        d.push_back(p.second);
        if (!(p.second > 0.0)) all_positive = false;
    }
    if (all_positive) {
        out.fit = fit_rate(out.points);
        out.fit_valid = true;
    }
    out.decreasing = strictly_decreasing(d);
    out.pass = out.decreasing;
}

} // namespace detail

// Distance of the terminal phi between regularized-operator explicit runs and
// the exact-operator implicit reference, per lambda in a decreasing schedule.
inline ScheduleStudyResult study_lambda(const SpectralPlan& plan, const PotentialSpec& pot,
                                        const SystemParams& base, const InitialData& init,
                                        const std::vector<double>& lambdas,
                                        const ObservationWindow& window,
                                        std::size_t save_stride = 1) {
    if (lambdas.size() < 2)
        throw validation_error("lambda study: schedule needs at least two values");
    window.validate_for(plan.grid());
    if (!(base.beta > 0.0) || !(base.eps > 0.0))
        throw validation_error("lambda study: base parameters need beta > 0 and eps > 0");

    SystemParams ref_params = base;
    ref_params.lambda = 0.0;
    Trajectory ref = run_system(plan, pot, ref_params, init, save_stride);
    const Field& phi_ref = ref.states.back().phi;

    ScheduleStudyResult out;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0))
            throw validation_error("lambda study: lambdas must be positive");
        if (i > 0 && !(lambdas[i] < lambdas[i - 1]))
            throw validation_error("lambda study: schedule must decrease strictly");
        SystemParams prm = base;
        prm.lambda = lambdas[i];
        Trajectory t = integrate_regularized(plan, pot, prm, init, save_stride);
        out.points.emplace_back(lambdas[i],
                                windowed_h_distance(t.states.back().phi, phi_ref, window));
    }
    detail::finish_schedule_study(out);
    return out;
}

// Same shape for the graph regularization: implicit runs with eps > 0 against
// the exact-graph (eps = 0) implicit reference.
inline ScheduleStudyResult study_epsilon(const SpectralPlan& plan, const PotentialSpec& pot,
                                         const SystemParams& base, const InitialData& init,
                                         const std::vector<double>& epsilons,
                                         const ObservationWindow& window,
                                         std::size_t save_stride = 1) {
    if (epsilons.size() < 2)
        throw validation_error("epsilon study: schedule needs at least two values");
    window.validate_for(plan.grid());
    SystemParams ref_params = base;
    ref_params.eps = 0.0;
    ref_params.lambda = 0.0;
    Trajectory ref = run_system(plan, pot, ref_params, init, save_stride);
    const Field& phi_ref = ref.states.back().phi;

    ScheduleStudyResult out;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0))
            throw validation_error("epsilon study: epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw validation_error("epsilon study: schedule must decrease strictly");
        SystemParams prm = base;
        prm.eps = epsilons[i];
        prm.lambda = 0.0;
        Trajectory t = run_system(plan, pot, prm, init, save_stride);
        out.points.emplace_back(epsilons[i],
                                windowed_h_distance(t.states.back().phi, phi_ref, window));
    }
    detail::finish_schedule_study(out);
    return out;
}

// --- domain-truncation insensitivity ----------------------------------------------

struct TruncationRow {
    double length = 0.0;      // domain length of the larger run in the pair
    double difference = 0.0;  // windowed sup-H difference of (mu, phi, sigma)
};

struct TruncationResult {
    std::vector<double> lengths;
    std::vector<TruncationRow> rows; // consecutive-pair differences
    bool pass = false;
};

using ProfileFn = std::function<double(const std::array<double, 3>&)>;

// Grows the domain by doubling (fixed spacing, shared origin) and measures the
// terminal difference inside a fixed window; data must be supported inside the
// window so the far boundary is the only thing that changes.
inline TruncationResult study_domain_truncation(const PotentialSpec& pot,
                                                const SystemParams& base, double h,
                                                std::size_t n_smallest, int doublings,
                                                const ObservationWindow& window,
                                                const ProfileFn& mu0, const ProfileFn& phi0,
                                                const ProfileFn& sigma0,
                                                double smoothing_eps = 0.0,
                                                std::size_t save_stride = 0) {
    if (doublings < 1) throw validation_error("truncation study: needs at least one doubling");
    if (n_smallest < 3) throw validation_error("truncation study: smallest grid too small");
    if (save_stride == 0) save_stride = static_cast<std::size_t>(std::llround(base.t_end / base.dt));

    TruncationResult out;
    std::vector<State> finals;
    for (int j = 0; j <= doublings; ++j) {
        const std::size_t n = ((n_smallest - 1) << j) + 1;
        Grid g({n}, {h});
        if (j == 0) window.validate_for(g);
        SpectralPlan plan(g);
        Field f_mu = Field::from_function(g, mu0);
        Field f_phi = Field::from_function(g, phi0);
        Field f_sigma = Field::from_function(g, sigma0);
        // support rule: outside the window the data must vanish to roundoff,
        // otherwise the grown domains see different initial mass
        double inside_max = 0.0, outside_max = 0.0;
        for (const Field* f : {&f_mu, &f_phi, &f_sigma})
            for (std::size_t i = 0; i < f->size(); ++i) {
                const double a = std::abs(f->v[i]);
                if (window.contains(g, i))
                    inside_max = std::max(inside_max, a);
                else
                    outside_max = std::max(outside_max, a);
            }
        if (!(outside_max <= 1e-12 * std::max(1e-300, inside_max)))
            throw validation_error(
                "truncation study: initial data support violates the window margin rule");

        InitialData init(std::move(f_mu), std::move(f_phi), std::move(f_sigma), smoothing_eps);
        Trajectory t = run_system(plan, pot, base, init, save_stride);
        finals.push_back(t.states.back());
        out.lengths.push_back(g.length(0));
    }
    for (int j = 0; j + 1 <= doublings; ++j) {
        TruncationRow row;
        row.length = out.lengths[static_cast<std::size_t>(j) + 1];
        row.difference = std::max(
            {windowed_h_distance_cross(finals[j].mu, finals[j + 1].mu, window),
             windowed_h_distance_cross(finals[j].phi, finals[j + 1].phi, window),
             windowed_h_distance_cross(finals[j].sigma, finals[j + 1].sigma, window)});
        out.rows.push_back(row);
    }
    std::vector<double> d;
    for (const auto& r : out.rows) d.push_back(r.difference);
    out.pass = strictly_decreasing(d);
    return out;
}

// --- continuous-dependence (contraction) study -------------------------------------

struct ContractionRow {
    double delta = 0.0;
    double final_metric = 0.0; // 1/2 dual(theta)^2 + 1/2 |sigma|_H^2 at T
    double ratio = 0.0;        // final_metric / delta^2
};

struct ContractionResult {
    std::vector<ContractionRow> rows;
    double spread = 0.0; // max ratio / min ratio
    bool pass = false;
};

// Perturbs the initial data by delta times fixed unit-scale profiles and
// checks that the terminal squared distance scales like delta^2 (ratios agree
// within max_rel_spread).
inline ContractionResult study_contraction(const SpectralPlan& plan, const PotentialSpec& pot,
                                           const SystemParams& base, const InitialData& init,
                                           const Field& dmu, const Field& dphi,
                                           const Field& dsigma,
                                           const std::vector<double>& deltas,
                                           std::size_t save_stride = 0,
                                           double max_rel_spread = 0.10) {
    if (deltas.empty()) throw validation_error("contraction study: empty delta schedule");
    if (save_stride == 0) save_stride = static_cast<std::size_t>(std::llround(base.t_end / base.dt));
    Trajectory ref = run_system(plan, pot, base, init, save_stride);
    const State& rf = ref.states.back();

    ContractionResult out;
    for (double delta : deltas) {
        if (!(delta > 0.0)) throw validation_error("contraction study: deltas must be positive");
        Field m = init.mu0, f = init.phi0, s = init.sigma0;
        add_scaled(m, delta, dmu);
        add_scaled(f, delta, dphi);
        add_scaled(s, delta, dsigma);
        InitialData pinit(std::move(m), std::move(f), std::move(s), init.smoothing_eps);
        Trajectory t = run_system(plan, pot, base, pinit, save_stride);
        const State& pf = t.states.back();

        Field theta(plan.grid());
        for (std::size_t i = 0; i < theta.size(); ++i)
            theta.v[i] = base.alpha * (pf.mu.v[i] - rf.mu.v[i]) + (pf.phi.v[i] - rf.phi.v[i]) +
                         (pf.sigma.v[i] - rf.sigma.v[i]);
        Field dsig = pf.sigma - rf.sigma;
        const double dn = dual_norm(plan, theta);
        ContractionRow row;
        row.delta = delta;
        row.final_metric = 0.5 * dn * dn + 0.5 * inner_h(dsig, dsig);
        row.ratio = row.final_metric / (delta * delta);
        out.rows.push_back(row);
    }
    double rmin = out.rows.front().ratio, rmax = rmin;
    for (const auto& r : out.rows) {
        rmin = std::min(rmin, r.ratio);
        rmax = std::max(rmax, r.ratio);
    }
    out.spread = rmax / rmin;
    out.pass = (rmax - rmin) <= max_rel_spread * rmin;
    return out;
}

// --- uniform-bound monitor -----------------------------------------------------------

struct MonitorRow {
    double beta = 0.0;
    double sup_mu = 0.0;      // sqrt(alpha) * sup_t |mu|_H
    double l2_grad_mu = 0.0;  // (sum dt |grad mu|^2)^(1/2)
    double visc_rate = 0.0;   // sqrt(beta) * (sum dt |dphi/dt|^2)^(1/2)
    double sup_phi_v = 0.0;   // sup_t |phi|_V
    double sup_sigma = 0.0;   // sup_t |sigma|_H
    double envelope = 0.0;    // max of the above
};

struct MonitorResult {
    std::vector<MonitorRow> rows;
    double spread = 0.0;
    bool pass = false;
};

// The a-priori-estimate surrogate: the quantity bundle must stay bounded by an
// envelope independent of beta (spread of the per-beta envelopes below
// max_rel_spread). Trajectories are saved every step to resolve the rates.
inline MonitorResult monitor_uniform_bounds(const SpectralPlan& plan, const PotentialSpec& pot,
                                            const SystemParams& base, const InitialData& init,
                                            const std::vector<double>& betas,
                                            double max_rel_spread = 0.05) {
    if (betas.empty()) throw validation_error("monitor: empty beta schedule");
    MonitorResult out;
    for (double beta : betas) {
        SystemParams prm = base;
        prm.beta = beta;
        Trajectory t = run_system(plan, pot, prm, init, 1);
        MonitorRow row;
        row.beta = beta;
        double grad_acc = 0.0, rate_acc = 0.0;
        for (std::size_t k = 0; k < t.states.size(); ++k) {
            const State& s = t.states[k];
            row.sup_mu = std::max(row.sup_mu, std::sqrt(prm.alpha) * norm_h(s.mu));
            row.sup_phi_v = std::max(row.sup_phi_v, norm_v(s.phi));
            row.sup_sigma = std::max(row.sup_sigma, norm_h(s.sigma));
            if (k > 0) {
                const double dt_k = t.times[k] - t.times[k - 1];
                grad_acc += dt_k * grad_sq(s.mu);
                Field r = s.phi - t.states[k - 1].phi;
                rate_acc += inner_h(r, r) / dt_k;
            }
        }
        row.l2_grad_mu = std::sqrt(grad_acc);
        row.visc_rate = std::sqrt(prm.beta) * std::sqrt(rate_acc);
        row.envelope = std::max(
            {row.sup_mu, row.l2_grad_mu, row.visc_rate, row.sup_phi_v, row.sup_sigma});
        out.rows.push_back(row);
    }
    double emin = out.rows.front().envelope, emax = emin;
    for (const auto& r : out.rows) {
        emin = std::min(emin, r.envelope);
        emax = std::max(emax, r.envelope);
    }
    out.spread = emax / emin;
    out.pass = (emax - emin) <= max_rel_spread * emin;
    return out;
}

} // namespace vch
