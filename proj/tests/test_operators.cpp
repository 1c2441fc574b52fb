#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <vch/operators.hpp>
#include <vch/random.hpp>

#include "support/dense_oracle.hpp"

using Catch::Approx;
using namespace vch;

namespace {

// smooth low-mode test field: a few cosines, so spectral tails are negligible
Field smooth_field(const Grid& g) {
    return Field::from_function(g, [&](const std::array<double, 3>& x) {
        double s = 0.0;
        for (int a = 0; a < g.dims(); ++a) {
            const double t = (x[a] - g.origin(a)) / g.length(a);
            s += 0.8 * std::cos(M_PI * t) - 0.35 * std::cos(2.0 * M_PI * t) +
                 0.1 * std::cos(3.0 * M_PI * t);
        }
        return s + 0.25;
    });
}

} // namespace

TEST_CASE("resolvent solves its defining equation and matches the dense solve", "[operators]") {
    Rng rng(17);
    for (const Grid& g : {Grid({16}, {0.5}), Grid({8, 8}, {0.4, 0.55})}) {
        SpectralPlan plan(g);
        for (double lambda : {1.0, 0.1, 0.01}) {
            for (int t = 0; t < 5; ++t) {
                Field f = random_field(g, rng);
                Field jf = resolvent(plan, lambda, f);
                Field back = jf - (lambda * laplacian_apply(jf));
                REQUIRE(norm_h(back - f) <= 1e-10 * norm_h(f));
                Field ref = oracle::dense_resolvent(g, lambda, f);
                REQUIRE(norm_h(jf - ref) <= 1e-10 * norm_h(f));
            }
        }
    }
    Grid g({16}, {0.5});
    SpectralPlan plan(g);
    REQUIRE_THROWS_AS(resolvent(plan, 0.0, Field(g)), validation_error);
    REQUIRE_THROWS_AS(yosida_laplacian(plan, -1.0, Field(g)), validation_error);
}

TEST_CASE("yosida operator defect on smooth fields is first order in lambda", "[operators]") {
    Grid g({33}, {10.0 / 32.0});
    SpectralPlan plan(g);
    Field f = smooth_field(g);
    Field exact = laplacian_apply(f);
    auto defect = [&](double lambda) {
        Field y = yosida_laplacian(plan, lambda, f);
        add_scaled(y, 1.0, exact); // y should approximate -lap f
        return norm_h(y);
    };
    const double e1 = defect(1e-2), e2 = defect(5e-3), e3 = defect(2.5e-3);
    REQUIRE(e2 / e1 == Approx(0.5).epsilon(0.25));
    REQUIRE(e3 / e2 == Approx(0.5).epsilon(0.25));
}

TEST_CASE("yosida operator norm stays below 1/lambda", "[operators]") {
    Rng rng(29);
    Grid g({24}, {0.2});
    SpectralPlan plan(g);
    for (double lambda : {1.0, 0.05}) {
        for (int t = 0; t < 10; ++t) {
            Field f = random_field(g, rng);
            REQUIRE(norm_h(yosida_laplacian(plan, lambda, f)) <=
                    (1.0 / lambda) * norm_h(f) * (1.0 + 1e-13));
        }
    }
}

TEST_CASE("sqrt resolvent composes to the resolvent", "[operators]") {
    Rng rng(31);
    Grid g({16, 9}, {0.5, 0.7});
    SpectralPlan plan(g);
    for (double eps : {1.0, 0.37, 0.01}) {
        Field f = random_field(g, rng);
        Field twice = sqrt_resolvent(plan, eps, sqrt_resolvent(plan, eps, f));
        Field ref = resolvent(plan, eps, f);
        REQUIRE(norm_h(twice - ref) <= 1e-12 * norm_h(f));
    }
    Field f = random_field(g, rng);
    Field same = sqrt_resolvent(plan, 0.0, f);
    REQUIRE(norm_h(same - f) == 0.0);
    REQUIRE_THROWS_AS(sqrt_resolvent(plan, -0.1, f), validation_error);
}

TEST_CASE("dual norm matches the dense quadratic form", "[operators]") {
    Rng rng(37);
    for (const Grid& g : {Grid({16}, {0.5}), Grid({8, 8}, {0.4, 0.55})}) {
        SpectralPlan plan(g);
        for (int t = 0; t < 10; ++t) {
            Field f = random_field(g, rng);
            const double lhs = dual_norm(plan, f);
            const double ref = oracle::dense_dual_norm(g, f);
            REQUIRE(lhs == Approx(ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("norms are ordered dual <= flat <= first-order", "[operators]") {
    Rng rng(41);
    Grid g({20, 7}, {0.3, 0.8});
    SpectralPlan plan(g);
    for (int t = 0; t < 25; ++t) {
        Field f = random_field(g, rng);
        const double nd = dual_norm(plan, f);
        const double nh = norm_h(f);
        const double nv = norm_v(f);
        REQUIRE(nd <= nh * (1.0 + 1e-13));
        REQUIRE(nh <= nv * (1.0 + 1e-13));
    }
}

TEST_CASE("riesz map and its inverse roundtrip", "[operators]") {
    Rng rng(43);
    Grid g({16}, {0.5});
    SpectralPlan plan(g);
    for (int t = 0; t < 10; ++t) {
        Field f = random_field(g, rng);
        Field rt = riesz_invert(plan, riesz_apply(plan, f));
        REQUIRE(norm_h(rt - f) <= 1e-10 * norm_h(f));
        // Riesz-defining identity: <F v, w>_H = <v, w>_H + <grad v, grad w> for test pairs.
        Field w = random_field(g, rng);
        const double lhs = inner_h(riesz_apply(plan, f), w);
        const double rhs = inner_h(f, w) - inner_h(laplacian_apply(f), w);
        REQUIRE(lhs == Approx(rhs).epsilon(1e-10).margin(1e-12));
    }
}

TEST_CASE("smoothing with eps=1 is an isometry from flat to first-order norm", "[operators]") {
    Rng rng(47);
    for (const Grid& g : {Grid({16}, {0.5}), Grid({8, 8}, {0.4, 0.55})}) {
        SpectralPlan plan(g);
        for (int t = 0; t < 10; ++t) {
            Field f = random_field(g, rng);
            Field s = sqrt_resolvent(plan, 1.0, f);
            REQUIRE(norm_v(s) == Approx(norm_h(f)).epsilon(1e-10));
            REQUIRE(norm_h(s) == Approx(dual_norm(plan, f)).epsilon(1e-10));
        }
    }
}

TEST_CASE("randomized identity verification passes and serializes", "[operators]") {
    Grid g({16}, {0.5});
    SpectralPlan plan(g);
    VerificationReport rep = verify_operator_identities(plan, 100, 0xfeed);
    CAPTURE(rep.to_text());
    REQUIRE(rep.all_pass);
    REQUIRE(rep.rows.size() >= 8);
    for (const auto& row : rep.rows) REQUIRE(row.trials == 100);

    Grid g2({8, 8}, {0.4, 0.55});
    SpectralPlan plan2(g2);
    VerificationReport rep2 = verify_operator_identities(plan2, 100, 0xbeef);
    CAPTURE(rep2.to_text());
    REQUIRE(rep2.all_pass);

    const std::string text = rep.to_text();
    REQUIRE(text.find("identity=resolvent_residual") != std::string::npos);
    REQUIRE(text.find("all_pass=yes") != std::string::npos);
    REQUIRE_THROWS_AS(verify_operator_identities(plan, 0), validation_error);
}
