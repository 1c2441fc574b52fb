#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "grid.hpp"

namespace vch {

// Orthonormal cosine-basis plan for a grid.
//
// Along one axis with n nodes (N = n-1 intervals, spacing h, length L = N*h)
// the basis vectors are e_k(i) = cos(pi*k*i/N). They are orthogonal under the
// trapezoidal inner product and are exact eigenvectors of the reflected
// second-difference operator with eigenvalues
//
//     kappa_k = (2 - 2*cos(pi*k/N)) / h^2,  k = 0..N.
//
// The plan stores the weighted analysis matrix and the synthesis matrix per
// axis (normalized so analysis is an isometry from the quadrature inner
// product to plain coefficient l2), plus the combined eigenvalue table.
// Multi-axis transforms are tensor products, applied line by line.
class SpectralPlan {
public:
    explicit SpectralPlan(const Grid& g) : grid_(g) {
        for (int a = 0; a < g.dims(); ++a) build_axis(a);
        kappa_.assign(g.size(), 0.0);
        std::array<std::size_t, 3> idx;
        for (std::size_t i = 0; i < g.size(); ++i) {
            g.decompose(i, idx);
            double k = 0.0;
            for (int a = 0; a < g.dims(); ++a) k += axis_[a].kappa[idx[a]];
            kappa_[i] = k;
        }
    }

    const Grid& grid() const { return grid_; }

    // Eigenvalue of the negated reflected Laplacian for each flat mode index.
    const std::vector<double>& eigenvalues() const { return kappa_; }

    Field transform(const Field& f) const {
        if (f.grid != grid_) throw validation_error("spectral: field grid does not match plan");
        Field out = f;
        for (int a = 0; a < grid_.dims(); ++a) apply_axis(out, a, /*forward=*/true);
        if (!is_finite(out)) throw_non_finite(f, "transform");
        return out;
    }

    Field inverse_transform(const Field& c) const {
        if (c.grid != grid_) throw validation_error("spectral: field grid does not match plan");
        Field out = c;
        for (int a = 0; a < grid_.dims(); ++a) apply_axis(out, a, /*forward=*/false);
        if (!is_finite(out)) throw_non_finite(c, "inverse_transform");
        return out;
    }

    // inverse_transform(m .* transform(f)) for a per-mode multiplier table.
    Field multiplier_apply(const Field& f, const std::vector<double>& m) const {
        if (m.size() != grid_.size())
            throw validation_error("spectral: multiplier table has wrong size");
        Field c = transform(f);
        for (std::size_t i = 0; i < c.size(); ++i) c.v[i] *= m[i];
        return inverse_transform(c);
    }

    Field apply_eigen_function(const Field& f, const std::function<double(double)>& fn) const {
        std::vector<double> m(kappa_.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = fn(kappa_[i]);
        return multiplier_apply(f, m);
    }

private:
    struct AxisPlan {
        std::size_t n = 0;
        std::vector<double> fwd;   // n*n, row k: coefficients from samples
        std::vector<double> inv;   // n*n, row i: samples from coefficients
        std::vector<double> kappa; // n
    };

    void build_axis(int a) {
        const std::size_t n = grid_.extent(a);
        const std::size_t N = n - 1;
        const double h = grid_.spacing(a);
        const double L = grid_.length(a);

        // cos(pi*m/N) for m = 0..2N-1, filled via quadrant symmetry so the
        // table is exactly symmetric and the matrices inherit clean
        // orthogonality.
        std::vector<double> table(2 * N, 0.0);
        for (std::size_t m = 0; m <= N / 2; ++m) {
            const double c = std::cos(M_PI * static_cast<double>(m) / static_cast<double>(N));
            table[m] = c;
            table[N - m] = -c;
            table[N + m] = -c;
            table[(2 * N - m) % (2 * N)] = c;
        }
        table[0] = 1.0; // overwrite the (2N - 0) % 2N alias

        AxisPlan ap;
        ap.n = n;
        ap.fwd.assign(n * n, 0.0);
        ap.inv.assign(n * n, 0.0);
        ap.kappa.assign(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double ck = (k == 0 || k == N) ? 1.0 : 0.5;
            const double scale = 1.0 / std::sqrt(ck * L);
            ap.kappa[k] = (2.0 - 2.0 * table[k]) / (h * h);
            for (std::size_t i = 0; i < n; ++i) {
                const double basis = table[(k * i) % (2 * N)] * scale;
                const double wi = (i == 0 || i == N) ? 0.5 * h : h;
                ap.fwd[k * n + i] = wi * basis;
                ap.inv[i * n + k] = basis;
            }
        }
        axis_[a] = std::move(ap);
    }

    void apply_axis(Field& f, int a, bool forward) const {
        const AxisPlan& ap = axis_[a];
        const std::size_t n = ap.n;
        const std::size_t st = grid_.stride(a);
        const std::vector<double>& M = forward ? ap.fwd : ap.inv;
        std::vector<double> line(n), res(n);
        std::array<std::size_t, 3> idx;
        for (std::size_t base = 0; base < grid_.size(); ++base) {
            grid_.decompose(base, idx);
            if (idx[a] != 0) continue;
            for (std::size_t i = 0; i < n; ++i) line[i] = f.v[base + i * st];
            for (std::size_t k = 0; k < n; ++k) {
                double s = 0.0;
                const double* row = &M[k * n];
                for (std::size_t i = 0; i < n; ++i) s += row[i] * line[i];
                res[k] = s;
            }
            for (std::size_t k = 0; k < n; ++k) f.v[base + k * st] = res[k];
        }
    }

    Grid grid_;
    std::array<AxisPlan, 3> axis_;
    std::vector<double> kappa_;
};

} // namespace vch
