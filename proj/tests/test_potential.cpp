#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <vch/potential.hpp>
#include <vch/random.hpp>

#include "support/scalar_oracle.hpp"

using Catch::Approx;
using namespace vch;

namespace {

PotentialSpec quartic_as_table(double c_g, double span = 4.0, int nodes = 401) {
    PotentialSpec src = quartic_potential(c_g);
    std::vector<double> r(nodes), b(nodes), pi(nodes);
    for (int i = 0; i < nodes; ++i) {
        r[i] = -span + 2.0 * span * static_cast<double>(i) / static_cast<double>(nodes - 1);
        b[i] = src.b(r[i]);
        pi[i] = src.pi(r[i]);
    }
    return table_potential(r, b, pi, src.pi_lip, "table-of-quartic");
}

} // namespace

TEST_CASE("resolvent reproduces hand-checked values", "[potential]") {
    // c=1/8, eps=1: s + 0.5 s^3 = 6 has the exact root 2
    PotentialSpec p = quartic_potential(0.125);
    REQUIRE(resolvent_scalar(p, 1.0, 6.0) == Approx(2.0).margin(6e-12));
    REQUIRE(yosida_scalar(p, 1.0, 6.0) == Approx(4.0).margin(2e-11));
    // envelope: (6-2)^2/2 + bhat(2) = 8 + 2
    REQUIRE(moreau_envelope(p, 1.0, 6.0) == Approx(10.0).margin(1e-10));
    // regularized slope at 6: yosida + pi = 4 - 3
    REQUIRE(g_eps_prime(p, 1.0, 6.0) == Approx(1.0).margin(2e-11));
    REQUIRE(g_eps(p, 1.0, 6.0) == Approx(1.0).margin(1e-10));

    // c=0.2, eps=0.3: root of s + 0.24 s^3 = 1.7, value pinned from a
    // high-precision offline solve of the cubic.
    PotentialSpec q = quartic_potential(0.2);
    const double root = 1.24114332712688402;
    REQUIRE(resolvent_scalar(q, 0.3, 1.7) == Approx(root).margin(1e-12));
    REQUIRE(moreau_envelope(q, 0.3, 1.7) == Approx(0.82550482510373578).margin(1e-11));
    REQUIRE(yosida_scalar(q, 0.3, 1.7) == Approx(1.52952224291038660).margin(1e-11));
    // the bisection oracle must land on the same root
    REQUIRE(oracle::bisect_resolvent(q.b, 0.3, 1.7) == Approx(root).margin(1e-13));
}

TEST_CASE("resolvent residual contract holds across graphs and scales", "[potential]") {
    Rng rng(101);
    const std::vector<PotentialSpec> pots = {quartic_potential(0.2), classical_double_well(),
                                             quartic_as_table(0.2, 60.0, 2001)};
    for (const auto& pot : pots) {
        for (double eps : {1e-3, 0.3, 1.0, 30.0}) {
            for (int t = 0; t < 40; ++t) {
                const double r = rng.uniform(-50.0, 50.0);
                const double s = resolvent_scalar(pot, eps, r);
                const double resid = std::abs((s - r) + eps * pot.b(s));
                REQUIRE(resid <= 1e-12 * std::max(1.0, std::abs(r)));
                const double ref = oracle::bisect_resolvent(pot.b, eps, r);
                REQUIRE(s == Approx(ref).margin(1e-9 * std::max(1.0, std::abs(ref))));
            }
        }
    }
}

TEST_CASE("resolvent of the flat graph segment returns the input", "[potential]") {
    // classical split: b vanishes on [-1,1], so the resolvent is the identity there
    PotentialSpec p = classical_double_well();
    REQUIRE(resolvent_scalar(p, 2.0, 0.7) == Approx(0.7).margin(1e-13));
    REQUIRE(yosida_scalar(p, 2.0, -0.4) == Approx(0.0).margin(1e-13));
}

TEST_CASE("moreau envelope is squeezed between zero and the convex part", "[potential]") {
    for (const auto& pot : {quartic_potential(0.2), classical_double_well()}) {
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            for (int i = 0; i < 10001; ++i) {
                const double r = -10.0 + 20.0 * static_cast<double>(i) / 10000.0;
                const double env = moreau_envelope(pot, eps, r);
                REQUIRE(env >= -1e-12);
                REQUIRE(env <= pot.bhat(r) * (1.0 + 1e-12) + 1e-12);
            }
        }
    }
}

TEST_CASE("envelope differentiates to the yosida regularization", "[potential]") {
    // generic sample offsets keep the probe away from the truncation kinks
    const double delta = 1e-4;
    for (const auto& pot : {quartic_potential(0.2), classical_double_well()}) {
        for (double eps : {1e-1, 1e-2}) {
            for (int i = 0; i <= 100; ++i) {
                const double r = -5.0 + 0.1 * static_cast<double>(i) + 0.0317;
                const double fd =
                    (moreau_envelope(pot, eps, r + delta) - moreau_envelope(pot, eps, r - delta)) /
                    (2.0 * delta);
                REQUIRE(fd == Approx(yosida_scalar(pot, eps, r)).margin(1e-6));
            }
        }
    }
}

TEST_CASE("yosida regularization is tame: bounded by b, monotone in eps, Lipschitz", "[potential]") {
    Rng rng(7);
    PotentialSpec pot = quartic_potential(0.2);
    for (int t = 0; t < 200; ++t) {
        const double r = rng.uniform(-8.0, 8.0);
        const double y1 = yosida_scalar(pot, 0.05, r);
        const double y2 = yosida_scalar(pot, 0.5, r);
        REQUIRE(std::abs(y1) <= std::abs(pot.b(r)) * (1.0 + 1e-11) + 1e-12);
        REQUIRE(std::abs(y2) <= std::abs(y1) * (1.0 + 1e-11) + 1e-12);

        const double a = rng.uniform(-8.0, 8.0);
        const double ja = resolvent_scalar(pot, 0.5, a);
        const double jr = resolvent_scalar(pot, 0.5, r);
        REQUIRE(std::abs(ja - jr) <= std::abs(a - r) * (1.0 + 1e-10) + 1e-12);
        REQUIRE(std::abs(yosida_scalar(pot, 0.5, a) - yosida_scalar(pot, 0.5, r)) <=
                (1.0 / 0.5) * std::abs(a - r) * (1.0 + 1e-10) + 1e-12);
    }
}

TEST_CASE("regularized potential keeps the quadratic lower bound", "[potential]") {
    for (const auto& pot : {quartic_potential(0.2), classical_double_well()}) {
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            for (int i = 0; i < 10001; ++i) {
                const double r = -10.0 + 20.0 * static_cast<double>(i) / 10000.0;
                const double lhs = g_eps(pot, eps, r);
                const double bound =
                    -0.5 * pot.pi_lip * r * r - 2.0 * pot.pi_lip * eps * r * r;
                REQUIRE(lhs >= bound - 1e-10 * (1.0 + r * r));
            }
        }
    }
}

TEST_CASE("envelope of the symmetric quartic is nondecreasing on the right half axis",
          "[potential]") {
    PotentialSpec pot = quartic_potential(0.2);
    for (double eps : {0.5, 1e-2}) {
        double prev = moreau_envelope(pot, eps, 0.0);
        for (int i = 1; i <= 200; ++i) {
            const double r = 10.0 * static_cast<double>(i) / 200.0;
            const double cur = moreau_envelope(pot, eps, r);
            REQUIRE(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("eps=0 falls back to the exact split", "[potential]") {
    PotentialSpec pot = quartic_potential(0.2);
    for (double r : {-2.3, 0.0, 0.7, 4.1}) {
        REQUIRE(g_eps_prime(pot, 0.0, r) == pot.b(r) + pot.pi(r));
        REQUIRE(g_eps(pot, 0.0, r) == pot.bhat(r) + pot.pihat(r));
    }
}

TEST_CASE("condition checker accepts a compliant quartic", "[potential]") {
    ConditionReport rep = check_conditions(quartic_potential(0.2));
    CAPTURE(rep.to_text());
    REQUIRE(rep.all_pass);
    REQUIRE(rep.pi_lip_declared == Approx(0.8));
    // the zoomed slope scan carries ~2e-8 of cancellation noise on a linear pi
    REQUIRE(rep.pi_lip_empirical == Approx(0.8).margin(1e-7));
    REQUIRE(rep.find("convex_core") != nullptr);
    REQUIRE(rep.find("coercivity_balance")->pass);
}

TEST_CASE("condition checker rejects an oversteep quartic", "[potential]") {
    ConditionReport rep = check_conditions(quartic_potential(0.3));
    REQUIRE_FALSE(rep.all_pass);
    const auto* bal = rep.find("coercivity_balance");
    REQUIRE(bal != nullptr);
    REQUIRE_FALSE(bal->pass);
    REQUIRE(bal->witness_value == Approx(1.2).margin(1e-9));
    // everything else is fine
    REQUIRE(rep.find("convex_core")->pass);
    REQUIRE(rep.find("perturbation_lipschitz")->pass);
}

TEST_CASE("condition checker rejects the classical textbook split", "[potential]") {
    ConditionReport rep = check_conditions(classical_double_well());
    REQUIRE_FALSE(rep.all_pass);
    const auto* bal = rep.find("coercivity_balance");
    REQUIRE_FALSE(bal->pass);
    REQUIRE(bal->witness_value == Approx(2.0).margin(1e-6));
    // the sampled slope comes out just under the sharp constant 2
    REQUIRE(rep.pi_lip_empirical > 1.97);
    REQUIRE(rep.pi_lip_empirical <= 2.0 + 1e-9);
    const std::string text = rep.to_text();
    REQUIRE(text.find("condition=coercivity_balance pass=no") != std::string::npos);
    REQUIRE(text.find("all_pass=no") != std::string::npos);
}

TEST_CASE("condition checker flags an understated lipschitz certificate", "[potential]") {
    PotentialSpec lying;
    lying.bhat = [](double r) { return 0.25 * r * r * r * r; };
    lying.b = [](double r) { return r * r * r; };
    lying.pi = [](double r) { return -r; };
    lying.pihat = [](double r) { return -0.5 * r * r; };
    lying.pi_lip = 0.5; // actual slope is 1
    lying.name = "understated";
    ConditionReport rep = check_conditions(lying);
    const auto* lip = rep.find("perturbation_lipschitz");
    REQUIRE_FALSE(lip->pass);
    REQUIRE(rep.pi_lip_empirical >= 0.99);
}

TEST_CASE("potential constructors validate their inputs", "[potential]") {
    REQUIRE_THROWS_AS(quartic_potential(0.0), validation_error);
    REQUIRE_THROWS_AS(quartic_potential(-0.1), validation_error);
    REQUIRE_THROWS_AS(table_potential({0.0}, {0.0}, {0.0}, 1.0), validation_error);
    REQUIRE_THROWS_AS(table_potential({0.0, 1.0}, {0.0}, {0.0, 0.0}, 1.0), validation_error);
    REQUIRE_THROWS_AS(table_potential({1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}, 1.0), validation_error);
    REQUIRE_THROWS_AS(table_potential({0.0, 1.0}, {1.0, 0.0}, {0.0, 0.0}, 1.0), validation_error);
    REQUIRE_THROWS_AS(table_potential({1.0, 2.0}, {0.0, 1.0}, {0.0, 0.0}, 1.0), validation_error);
    REQUIRE_THROWS_AS(table_potential({-1.0, 1.0}, {0.0, 1.0}, {0.0, 0.0}, -1.0), validation_error);

    PotentialSpec p = quartic_potential(0.2);
    REQUIRE_THROWS_AS(resolvent_scalar(p, 0.0, 1.0), validation_error);
    REQUIRE_THROWS_AS(resolvent_scalar(p, -1.0, 1.0), validation_error);
    REQUIRE_THROWS_AS(resolvent_scalar(p, 1.0, std::nan("")), validation_error);
    REQUIRE_THROWS_AS(g_eps(p, -1e-9, 1.0), validation_error);

    // a decreasing "graph" cannot be bracketed
    PotentialSpec bad;
    bad.bhat = [](double) { return 0.0; };
    bad.b = [](double r) { return -r; };
    bad.pi = [](double) { return 0.0; };
    bad.pihat = [](double) { return 0.0; };
    bad.pi_lip = 0.0;
    REQUIRE_THROWS_AS(resolvent_scalar(bad, 1.0, 2.0), validation_error);
}

TEST_CASE("table potential tracks the function it sampled", "[potential]") {
    PotentialSpec tab = quartic_as_table(0.2);
    PotentialSpec ref = quartic_potential(0.2);
    const double root = resolvent_scalar(tab, 0.3, 1.7);
    REQUIRE(root == Approx(1.24114332712688402).margin(5e-4));
    for (double r : {-3.5, -1.2, 0.0, 0.5, 2.8}) {
        REQUIRE(tab.b(r) == Approx(ref.b(r)).margin(5e-4));
        REQUIRE(tab.bhat(r) == Approx(ref.bhat(r)).margin(2e-3));
        REQUIRE(tab.pihat(r) == Approx(ref.pihat(r)).margin(2e-3));
    }
    REQUIRE(tab.bhat(0.0) == 0.0);
    REQUIRE(tab.pihat(0.0) == 0.0);
}
