#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace vch {

// Tensor-product node grid on a box, rank 1..3.
//
// Nodes lie on the boundary: an axis with n nodes and spacing h spans a side
// of length (n-1)*h. Quadrature is trapezoidal per axis (weight h/2 at the two
// end nodes, h inside), so the weights of one axis sum exactly to its length.
// This node layout is the one whose cosine basis diagonalizes the reflected
// second-difference operator, which the spectral plan relies on.
class Grid {
public:
    Grid(std::vector<std::size_t> extents,
         std::vector<double> spacing,
         std::vector<double> origin = {}) {
        if (extents.empty() || extents.size() > 3)
            throw validation_error("grid: rank must be 1, 2 or 3");
        if (spacing.size() != extents.size())
            throw validation_error("grid: one spacing per axis required");
        if (origin.empty()) origin.assign(extents.size(), 0.0);
        if (origin.size() != extents.size())
            throw validation_error("grid: one origin per axis required");
        dims_ = static_cast<int>(extents.size());
        n_ = {1, 1, 1};
        h_ = {1.0, 1.0, 1.0};
        x0_ = {0.0, 0.0, 0.0};
        for (int a = 0; a < dims_; ++a) {
            if (extents[a] < 3)
                throw validation_error("grid: need at least 3 nodes per axis");
            if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
                throw validation_error("grid: spacing must be positive and finite");
            if (!std::isfinite(origin[a]))
                throw validation_error("grid: origin must be finite");
            n_[a] = extents[a];
            h_[a] = spacing[a];
            x0_[a] = origin[a];
        }
        stride_ = {1, 1, 1};
        for (int a = dims_ - 2; a >= 0; --a) stride_[a] = stride_[a + 1] * n_[a + 1];
        size_ = stride_[0] * n_[0];
    }

    int dims() const { return dims_; }
    std::size_t extent(int axis) const { return n_[axis]; }
    double spacing(int axis) const { return h_[axis]; }
    double origin(int axis) const { return x0_[axis]; }
    std::size_t size() const { return size_; }
    std::size_t stride(int axis) const { return stride_[axis]; }

    double length(int axis) const { return static_cast<double>(n_[axis] - 1) * h_[axis]; }

    double measure() const {
        double m = 1.0;
        for (int a = 0; a < dims_; ++a) m *= length(a);
        return m;
    }

    double coord(int axis, std::size_t i) const { return x0_[axis] + static_cast<double>(i) * h_[axis]; }

    // Trapezoidal weight of one node index along one axis.
    double axis_weight(int axis, std::size_t i) const {
        return (i == 0 || i + 1 == n_[axis]) ? 0.5 * h_[axis] : h_[axis];
    }

    void decompose(std::size_t flat, std::array<std::size_t, 3>& idx) const {
        idx = {0, 0, 0};
        for (int a = 0; a < dims_; ++a) {
            idx[a] = flat / stride_[a];
            flat -= idx[a] * stride_[a];
        }
    }

    // Full quadrature weight of a node (product over axes).
    double weight(std::size_t flat) const {
        std::array<std::size_t, 3> idx;
        decompose(flat, idx);
        double w = 1.0;
        for (int a = 0; a < dims_; ++a) w *= axis_weight(a, idx[a]);
        return w;
    }

    std::array<double, 3> point(std::size_t flat) const {
        std::array<std::size_t, 3> idx;
        decompose(flat, idx);
        std::array<double, 3> x = {0.0, 0.0, 0.0};
        for (int a = 0; a < dims_; ++a) x[a] = coord(a, idx[a]);
        return x;
    }

    bool operator==(const Grid& o) const {
        return dims_ == o.dims_ && n_ == o.n_ && h_ == o.h_ && x0_ == o.x0_;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    int dims_ = 1;
    std::array<std::size_t, 3> n_{1, 1, 1};
    std::array<double, 3> h_{1.0, 1.0, 1.0};
    std::array<double, 3> x0_{0.0, 0.0, 0.0};
    std::array<std::size_t, 3> stride_{1, 1, 1};
    std::size_t size_ = 0;
};

// A scalar sample per grid node, row-major with axis 0 slowest.
struct Field {
    Grid grid;
    std::vector<double> v;

    explicit Field(const Grid& g) : grid(g), v(g.size(), 0.0) {}
    Field(const Grid& g, std::vector<double> values) : grid(g), v(std::move(values)) {
        if (v.size() != grid.size())
            throw validation_error("field: value count does not match grid size");
    }

    static Field constant(const Grid& g, double c) {
        Field f(g);
        for (auto& x : f.v) x = c;
        return f;
    }

    static Field from_function(const Grid& g,
                               const std::function<double(const std::array<double, 3>&)>& fn) {
        Field f(g);
        for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] = fn(g.point(i));
        return f;
    }

    std::size_t size() const { return v.size(); }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
};

inline void require_same_grid(const Field& a, const Field& b, const char* who) {
    if (a.grid != b.grid)
        throw validation_error(std::string(who) + ": fields live on different grids");
}

inline bool is_finite(const Field& f) {
    for (double x : f.v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Error path shared by reductions/transforms: locate the first bad entry so
// the report carries the offending index.
[[noreturn]] inline void throw_non_finite(const Field& f, const char* who) {
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!std::isfinite(f.v[i]))
            throw validation_error(std::string(who) + ": non-finite value at flat index " +
                                   std::to_string(i));
    throw validation_error(std::string(who) + ": non-finite result from finite input");
}

// --- quadrature and norms ---------------------------------------------------

inline double inner_h(const Field& f, const Field& g) {
    require_same_grid(f, g, "inner_h");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.grid.weight(i) * f.v[i] * g.v[i];
    if (!std::isfinite(s)) {
        if (!is_finite(f)) throw_non_finite(f, "inner_h");
        throw_non_finite(g, "inner_h");
    }
    return s;
}

inline double norm_h(const Field& f) { return std::sqrt(inner_h(f, f)); }

inline double mass(const Field& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.grid.weight(i) * f.v[i];
    if (!std::isfinite(s)) throw_non_finite(f, "mass");
    return s;
}

// Squared gradient seminorm: forward differences on cell edges, each edge
// weighted by its own length times the trapezoidal weights of the transverse
// axes. With this pairing, <grad f, grad f> equals <-lap f, f> exactly (up to
// roundoff), which is what makes the discrete H/V norm identities hold.
inline double grad_sq(const Field& f) {
    const Grid& g = f.grid;
    double total = 0.0;
    std::array<std::size_t, 3> idx;
    for (int a = 0; a < g.dims(); ++a) {
        const std::size_t st = g.stride(a);
        const double h = g.spacing(a);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g.decompose(i, idx);
            if (idx[a] + 1 == g.extent(a)) continue; // no edge beyond the last node
            double w_t = 1.0;
            for (int b = 0; b < g.dims(); ++b)
                if (b != a) w_t *= g.axis_weight(b, idx[b]);
            const double d = (f.v[i + st] - f.v[i]) / h;
            total += w_t * h * d * d;
        }
    }
    if (!std::isfinite(total)) throw_non_finite(f, "grad_sq");
    return total;
}

inline double norm_v(const Field& f) {
    const double h2 = inner_h(f, f);
    return std::sqrt(h2 + grad_sq(f));
}

// Reflected (zero normal derivative) second-difference operator. End nodes use
// the mirror image of their single interior neighbor.
inline Field laplacian_apply(const Field& f) {
    const Grid& g = f.grid;
    Field out(g);
    std::array<std::size_t, 3> idx;
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.decompose(i, idx);
        double acc = 0.0;
        for (int a = 0; a < g.dims(); ++a) {
            const std::size_t st = g.stride(a);
            const double h2 = g.spacing(a) * g.spacing(a);
            const std::size_t k = idx[a];
            const double lo = (k == 0) ? f.v[i + st] : f.v[i - st];
            const double hi = (k + 1 == g.extent(a)) ? f.v[i - st] : f.v[i + st];
            acc += (lo - 2.0 * f.v[i] + hi) / h2;
        }
        out.v[i] = acc;
    }
    return out;
}

// --- small field arithmetic helpers ------------------------------------------

inline Field operator+(Field a, const Field& b) {
    require_same_grid(a, b, "field+");
    for (std::size_t i = 0; i < a.size(); ++i) a.v[i] += b.v[i];
    return a;
}

inline Field operator-(Field a, const Field& b) {
    require_same_grid(a, b, "field-");
    for (std::size_t i = 0; i < a.size(); ++i) a.v[i] -= b.v[i];
    return a;
}

inline Field operator*(double c, Field a) {
    for (auto& x : a.v) x *= c;
    return a;
}

// y += c * x
inline void add_scaled(Field& y, double c, const Field& x) {
    require_same_grid(y, x, "add_scaled");
    for (std::size_t i = 0; i < y.size(); ++i) y.v[i] += c * x.v[i];
}

inline Field map_pointwise(const Field& f, const std::function<double(double)>& fn) {
    Field out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) out.v[i] = fn(f.v[i]);
    return out;
}

} // namespace vch
