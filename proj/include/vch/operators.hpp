#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "random.hpp"
#include "spectral.hpp"

namespace vch {

// Resolvent of the reflected Laplacian: (I - lambda*lap)^{-1}, realized as the
// per-mode multiplier 1/(1 + lambda*kappa).
inline Field resolvent(const SpectralPlan& plan, double lambda, const Field& f) {
    if (!(lambda > 0.0)) throw validation_error("resolvent: lambda must be positive");
    return plan.apply_eigen_function(f, [lambda](double k) { return 1.0 / (1.0 + lambda * k); });
}

// Yosida regularization of -lap: (f - resolvent(f)) / lambda, computed in one
// pass as the multiplier kappa/(1 + lambda*kappa).
inline Field yosida_laplacian(const SpectralPlan& plan, double lambda, const Field& f) {
    if (!(lambda > 0.0)) throw validation_error("yosida_laplacian: lambda must be positive");
    return plan.apply_eigen_function(f, [lambda](double k) { return k / (1.0 + lambda * k); });
}

// Square root of the resolvent, (I - eps*lap)^{-1/2}. eps = 0 is the identity
// (useful as the "no smoothing" degenerate case).
inline Field sqrt_resolvent(const SpectralPlan& plan, double eps, const Field& f) {
    if (eps < 0.0) throw validation_error("sqrt_resolvent: eps must be nonnegative");
    if (eps == 0.0) return f;
    return plan.apply_eigen_function(f, [eps](double k) { return 1.0 / std::sqrt(1.0 + eps * k); });
}

// Riesz isomorphism of the first-order space: F = -lap + I and its inverse.
inline Field riesz_apply(const SpectralPlan& plan, const Field& f) {
    return plan.apply_eigen_function(f, [](double k) { return 1.0 + k; });
}

inline Field riesz_invert(const SpectralPlan& plan, const Field& f) {
    return plan.apply_eigen_function(f, [](double k) { return 1.0 / (1.0 + k); });
}

// Dual norm ||f||_{V*} = sqrt(<f, F^{-1} f>) = sqrt(sum coef^2/(1+kappa)).
// The per-mode form is nonnegative term by term; the guard documents the
// contract for any alternative inner-product route.
inline double dual_norm(const SpectralPlan& plan, const Field& f) {
    Field c = plan.transform(f);
    const std::vector<double>& kappa = plan.eigenvalues();
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c.v[i] * c.v[i] / (1.0 + kappa[i]);
    if (s < -1e-14) throw validation_error("dual_norm: negative radicand, operator symmetry broken");
    return std::sqrt(std::max(0.0, s));
}

// --- randomized identity verification ----------------------------------------

struct VerificationReport {
    struct Row {
        std::string identity;
        int trials = 0;
        double max_violation = 0.0;
        double tolerance = 0.0;
        bool pass = false;
    };
    std::vector<Row> rows;
    bool all_pass = true;

    void add(std::string name, int trials, double violation, double tol) {
        const bool ok = violation <= tol;
        rows.push_back({std::move(name), trials, violation, tol, ok});
        all_pass = all_pass && ok;
    }

    std::string to_text() const {
        std::ostringstream os;
        os.setf(std::ios::scientific);
        os.precision(3);
        for (const Row& r : rows)
            os << "identity=" << r.identity << " trials=" << r.trials
               << " max_violation=" << r.max_violation << " tolerance=" << r.tolerance
               << " pass=" << (r.pass ? "yes" : "no") << "\n";
        os << "all_pass=" << (all_pass ? "yes" : "no") << "\n";
        return os.str();
    }
};

// Randomized check of the operator toolbox on one grid:
//   * resolvent residual      (I - lambda*lap) J_lambda f = f
//   * sqrt-resolvent bound    ||J_lambda^{1/2} v||_H <= ||v||_H
//   * smoothing isometry      ||J_1^{1/2} v||_V = ||v||_H
//   * dual-norm bridge        ||J_1^{1/2} v||_H = ||v||_{V*}
//   * yosida-sqrt bound       ||((-lap)_lambda)^{1/2} v||_H <= ||v||_V
//   * riesz roundtrip         F^{-1} F v = v
//   * dual-norm inner form    ||v||_{V*}^2 = <v, J_1 v>_H
//   * stencil self-adjointness and nonnegativity of -lap
// Inequalities are recorded as violations (positive part of lhs - rhs).
inline VerificationReport verify_operator_identities(const SpectralPlan& plan,
                                                     int trials = 100,
                                                     std::uint64_t seed = 0x5eed) {
    if (trials < 1) throw validation_error("verify_operator_identities: need at least one trial");
    Rng rng(seed);
    const Grid& g = plan.grid();
    const double lambdas[] = {1.0, 0.1, 0.01};

    double v_res = 0.0, v_contract = 0.0, v_isometry = 0.0, v_bridge = 0.0;
    double v_yosida = 0.0, v_riesz = 0.0, v_dualform = 0.0, v_selfadj = 0.0, v_nonneg = 0.0;

    for (int t = 0; t < trials; ++t) {
        Field f = random_field(g, rng);
        Field q = random_field(g, rng);
        const double nh = norm_h(f);
        const double nv = norm_v(f);

        for (double lambda : lambdas) {
            Field jf = resolvent(plan, lambda, f);
            Field back = jf - (lambda * laplacian_apply(jf));
            v_res = std::max(v_res, norm_h(back - f) / nh);

            Field half = sqrt_resolvent(plan, lambda, f);
            v_contract = std::max(v_contract, (norm_h(half) - nh) / nh);

            Field yh = plan.apply_eigen_function(
                f, [lambda](double k) { return std::sqrt(k / (1.0 + lambda * k)); });
            v_yosida = std::max(v_yosida, (norm_h(yh) - nv) / nv);
        }

        Field smooth1 = sqrt_resolvent(plan, 1.0, f);
        v_isometry = std::max(v_isometry, std::abs(norm_v(smooth1) - nh) / nh);

        const double dn = dual_norm(plan, f);
        v_bridge = std::max(v_bridge, std::abs(norm_h(smooth1) - dn) / nh);

        Field rt = riesz_invert(plan, riesz_apply(plan, f));
        v_riesz = std::max(v_riesz, norm_h(rt - f) / nh);

        const double quad = inner_h(f, resolvent(plan, 1.0, f));
        v_dualform = std::max(v_dualform, std::abs(dn * dn - quad) / (nh * nh));

        Field lf = laplacian_apply(f);
        Field lq = laplacian_apply(q);
        const double asym = std::abs(inner_h(lf, q) - inner_h(f, lq));
        v_selfadj = std::max(v_selfadj, asym / (norm_h(f) * norm_h(q) + 1.0));
        v_nonneg = std::max(v_nonneg, inner_h(lf, f) / (nh * nh)); // <lap f, f> must stay <= 0
    }

    VerificationReport rep;
    rep.add("resolvent_residual", trials, v_res, 1e-10);
    rep.add("sqrt_resolvent_contraction", trials, v_contract, 1e-13);
    rep.add("smoothing_v_isometry", trials, v_isometry, 1e-10);
    rep.add("dual_norm_bridge", trials, v_bridge, 1e-11);
    rep.add("yosida_sqrt_v_bound", trials, v_yosida, 1e-13);
    rep.add("riesz_roundtrip", trials, v_riesz, 1e-10);
    rep.add("dual_norm_inner_form", trials, v_dualform, 1e-12);
    rep.add("laplacian_self_adjoint", trials, v_selfadj, 1e-10);
    rep.add("laplacian_nonnegative", trials, v_nonneg, 1e-13);
    return rep;
}

} // namespace vch
