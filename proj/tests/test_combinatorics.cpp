#include "doctest.h"

#include <cmath>
#include <vector>

#include "fracount/combinatorics.hpp"
#include "fracount/counting.hpp"
#include "fracount/specialfn.hpp"
#include "oracles.hpp"

using namespace fracount;
using oracle::rel_err;

namespace {

std::vector<FractalityParams> grid() {
    std::vector<FractalityParams> out;
    for (double mu : {0.3, 0.5, 0.7, 1.0})
        for (double beta : {-0.9 * mu, 0.0, (1 - mu) / 2, 1 - mu}) {
            if (out.size() && out.back() == FractalityParams(mu, beta)) continue;
            out.emplace_back(mu, beta);
        }
    return out;
}

double k(const FractalityParams& p, int n) { return oracle::ks_coeff(p.mu(), p.beta(), n); }

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST_CASE("stirling numbers of the second kind") {
    CHECK(stirling2(3, 2) == 3);
    CHECK(stirling2(4, 2) == 7);
    CHECK(stirling2(0, 0) == 1);
    for (int m = 1; m <= 30; ++m) {
        CHECK(stirling2(m, m) == 1);
        CHECK(stirling2(m, 0) == 0);
        CHECK(stirling2(m - 1, m) == 0);
    }
    // Values past 64 bits stay exact.
    CHECK(stirling2(30, 15) == BigInt("12879868072770626040000"));
    BigInt bell = 0;
    for (int l = 0; l <= 30; ++l) bell += stirling2(30, l);
    CHECK(bell == BigInt("846749014511809332450147"));
    CHECK_THROWS_AS(stirling2(31, 2), UnsupportedError);
    CHECK_THROWS_AS(stirling2(3, -1), InvalidParameter);
}

TEST_CASE("stirling numbers of the first kind") {
    CHECK(stirling1_signed(3, 2) == -3);
    CHECK(stirling1_signed(4, 2) == 11);
    for (int m = 0; m <= 30; ++m) CHECK(stirling1_signed(m, m) == 1);
    // Row sums: sum_l s(m,l) = 0 for m >= 2 (falling factorial at x = 1);
    // sum_l |s(m,l)| = m!.
    for (int m = 2; m <= 30; ++m) {
        BigInt sum = 0, abs_sum = 0;
        for (int l = 0; l <= m; ++l) {
            sum += stirling1_signed(m, l);
            abs_sum += abs(stirling1_signed(m, l));
        }
        CHECK(sum == 0);
        BigInt fact = 1;
        for (int j = 2; j <= m; ++j) fact *= j;
        CHECK(abs_sum == fact);
    }
    CHECK_THROWS_AS(stirling1_signed(40, 2), UnsupportedError);
}

TEST_CASE("stirling tables invert each other") {
    for (int m = 0; m <= 20; ++m)
        for (int n = 0; n <= 20; ++n) {
            BigInt sum = 0;
            for (int l = 0; l <= 20; ++l) sum += stirling2(m, l) * stirling1_signed(l, n);
            CHECK(sum == (m == n ? 1 : 0));
        }
}

TEST_CASE("a larger table agrees with the default one") {
    const StirlingTable big(40);
    CHECK(big.cap() == 40);
    for (int m = 0; m <= 30; ++m)
        for (int l = 0; l <= m; ++l) {
            CHECK(big.second_kind(m, l) == stirling2(m, l));
            CHECK(big.first_kind_signed(m, l) == stirling1_signed(m, l));
        }
    CHECK(big.second_kind(40, 39) == 780);
}

TEST_CASE("frac_comb_number examples") {
    CHECK(frac_comb_number({1, 0}, 4, 2) == doctest::Approx(7.0).epsilon(1e-14));
    const FractalityParams p(0.6, 0.25);
    for (int m = 1; m <= 8; ++m) CHECK(rel_err(frac_comb_number(p, m, m), factorial(m) * k(p, m)) < 1e-12);
    CHECK(rel_err(frac_comb_number({0.5, 0}, 3, 1), 1 / std::tgamma(1.5)) < 1e-13);
    CHECK(frac_comb_number(p, 0, 0) == 1.0);
    CHECK(frac_comb_number(p, 3, 0) == 0.0);
    CHECK(frac_comb_number(p, 3, 5) == 0.0);
}

TEST_CASE("frac_comb_number reduces to stirling2") {
    for (int m = 0; m <= 15; ++m)
        for (int l = 0; l <= m; ++l) {
            const double s = stirling2(m, l).convert_to<double>();
            CHECK(rel_err(frac_comb_number({1, 0}, m, l), s) <= 1e-12);
        }
}

TEST_CASE("closed small cases of the fractional combinatorial numbers") {
    for (const auto& p : grid()) {
        const double k1 = std::tgamma(p.beta() + 1) / std::tgamma(p.rho() + 1);
        for (int m = 1; m <= 20; ++m) {
            CHECK(rel_err(frac_comb_number(p, m, 1), k1) < 1e-10);
            CHECK(rel_err(frac_comb_number(p, m, m), factorial(m) * k(p, m)) < 1e-10);
            if (m >= 2) {
                CHECK(rel_err(frac_comb_number(p, m, 2), 2 * (std::pow(2.0, m - 1) - 1) * k(p, 2)) < 1e-10);
                CHECK(rel_err(frac_comb_number(p, m, m - 1), factorial(m) * (m - 1) / 2 * k(p, m - 1)) < 1e-10);
            }
        }
    }
}

TEST_CASE("frac_comb_table") {
    const FractalityParams p(0.5, 0.2);
    const auto table = frac_comb_table(p, 12);
    CHECK(table.cap == 12);
    for (int m = 0; m <= 12; ++m)
        for (int l = 0; l <= 12; ++l) CHECK(table.at(m, l) == frac_comb_number(p, m, l));
    CHECK_THROWS_AS(table.at(13, 1), UnsupportedError);
}

TEST_CASE("frac_polynomial and frac_number examples") {
    const FractalityParams p(0.4, 0.35);
    const double k1 = std::tgamma(1.35) / std::tgamma(1.75);
    CHECK(frac_polynomial(p, 2.5, 0) == 1.0);
    CHECK(rel_err(frac_polynomial(p, 2.5, 1), k1 * 2.5) < 1e-13);
    CHECK(frac_polynomial({1, 0}, 1, 4) == doctest::Approx(15.0).epsilon(1e-14));
    CHECK(frac_number({1, 0}, 3) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(rel_err(frac_number(p, 1), k1) < 1e-13);

    // B(2) = 1! K_1 S(2,1) + 2! K_2 S(2,2); the Gamma-product form printed
    // without the 2! would give 1.5 instead of the Bell number 2 at mu=1, beta=0.
    const double k2 = k1 * std::tgamma(0.4 + 0.7 + 1) / std::tgamma(0.8 + 0.7 + 1);
    CHECK(rel_err(frac_number(p, 2), k1 + 2 * k2) < 1e-12);
    CHECK(frac_number({1, 0}, 2) == doctest::Approx(2.0).epsilon(1e-14));

    for (int m = 0; m <= 12; ++m) {
        // Bell numbers.
        static const double bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597};
        CHECK(frac_number({1, 0}, m) == doctest::Approx(bell[m]).epsilon(1e-14));
    }
}

TEST_CASE("frac_polynomial equals the Dobinski-type double series") {
    // B(x,m) = sum_n n^m P(n) at lambda t^rho = x.
    for (const auto& p : {FractalityParams(0.5, 0), FractalityParams(0.7, 0.1), FractalityParams(1, -0.4)}) {
        for (double x : {0.5, 2.0, 5.0}) {
            std::vector<double> probs;
            for (int n = 0; n < 90; ++n) {
                const double z = -x;
                probs.push_back(oracle::to_d(boost::multiprecision::pow(oracle::mp(x), n) *
                                             oracle::shifted_series(p.mu(), p.beta(), n, z, 400)));
            }
            for (int m = 0; m <= 4; ++m) {
                double series = 0;
                for (int n = 0; n < 90; ++n) series += std::pow(n, m) * probs[n];
                CHECK(rel_err(frac_polynomial(p, x, m), series) < 1e-10);
            }
        }
    }
}

TEST_CASE("moment bridge") {
    const ProcessSpec spec{FractalityParams(0.6, 0.3), 1.4};
    const double t = 1.2;
    const double x = spec.rate * std::pow(t, spec.params.rho());
    const auto tab = pmf_table_auto(spec, t);
    for (int m = 1; m <= 4; ++m) {
        double brute = 0;
        for (std::size_t n = 0; n < tab.probs.size(); ++n) brute += std::pow(double(n), m) * tab.probs[n];
        CHECK(rel_err(frac_polynomial(spec.params, x, m), brute) < 1e-7);
    }
}

TEST_CASE("poly_genfun") {
    const FractalityParams p(0.5, 0);
    CHECK(poly_genfun({0.8, 0.1}, 0, 3) == 1.0);
    CHECK(rel_err(poly_genfun({1, 0}, 0.3, 2), std::exp(2 * std::expm1(0.3))) < 1e-13);
    CHECK(rel_err(poly_genfun(p, 0.1, 1), oracle::ml_half(std::expm1(0.1))) < 1e-12);

    // s-derivatives at 0, Richardson-extrapolated central differences.
    for (const auto& q : grid()) {
        if (q.rho() < 0.1) continue;
        const double x = 1.5;
        auto g = [&](double s) { return poly_genfun(q, s, x); };
        auto d1 = [&](double h) { return (g(h) - g(-h)) / (2 * h); };
        auto d2 = [&](double h) { return (g(h) - 2 * g(0) + g(-h)) / (h * h); };
        auto d3 = [&](double h) { return (g(2 * h) - 2 * g(h) + 2 * g(-h) - g(-2 * h)) / (2 * h * h * h); };
        const double h = 1e-2;
        CHECK(rel_err((4 * d1(h / 2) - d1(h)) / 3, frac_polynomial(q, x, 1)) < 1e-4);
        CHECK(rel_err((4 * d2(h / 2) - d2(h)) / 3, frac_polynomial(q, x, 2)) < 1e-4);
        CHECK(rel_err((4 * d3(h / 2) - d3(h)) / 3, frac_polynomial(q, x, 3)) < 1e-4);
    }
}

TEST_CASE("ks_via_stirling") {
    CHECK(rel_err(ks_via_stirling({1, 0}, 1, 20), std::exp(1.0)) < 1e-8);
    CHECK(ks_via_stirling({0.3, 0.2}, 0) == 1.0);
    CHECK(rel_err(ks_via_stirling({0.5, 0}, -0.5, 40), oracle::ml_half(-0.5)) < 1e-8);

    // The truncation error is the Taylor tail K_m z^m: at mu = 0.5, K_20 = 1/Gamma(11).
    CHECK_THROWS_AS(ks_via_stirling({0.5, 0}, -1, 20), ConvergenceError);
    CHECK_THROWS_AS(ks_via_stirling({1, 0}, 8, 10), ConvergenceError);
    CHECK_THROWS_AS(ks_via_stirling({1, 0}, 1, kIdentityMaxOrder + 1), UnsupportedError);
}

TEST_CASE("ks_via_stirling reproduces kilbas_saigo for |z| <= 1") {
    for (const auto& p : grid())
        for (double z : {-1.0, -0.5, 0.25, 1.0}) {
            INFO("mu=" << p.mu() << " beta=" << p.beta() << " z=" << z);
            CHECK(rel_err(ks_via_stirling(p, z, 150), kilbas_saigo(p, z)) < 1e-8);
        }
}

TEST_CASE("Kilbas-Saigo identities through Stirling numbers") {
    auto [lhs3, rhs3] = ks_identity_sides({1, 0}, 3);
    CHECK(lhs3 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rhs3 == doctest::Approx(1.0).epsilon(1e-13));
    auto [lhs0, rhs0] = ks_identity_sides({0.2, 0.5}, 0);
    CHECK(lhs0 == 1.0);
    CHECK(rhs0 == 1.0);
    auto [lhs2, rhs2] = ks_identity_sides({0.5, 0}, 2);
    CHECK(rel_err(rhs2, 2 / std::tgamma(2.0) * std::tgamma(1.0) / std::tgamma(1.5) * std::tgamma(1.5) / std::tgamma(2.0)) < 1e-13);
    CHECK(rel_err(lhs2, rhs2) < 1e-12);

    for (const auto& p : grid())
        for (int m : {0, 1, 2, 3, 5, 8, 12, 30, 80}) {
            const auto [a, b] = ks_identity_sides(p, m);
            const auto [c, d] = ks_identity_sides_comb(p, m);
            INFO("mu=" << p.mu() << " beta=" << p.beta() << " m=" << m);
            CHECK(rel_err(a, b) < 1e-9);
            CHECK(rel_err(c, d) < 1e-9);
            CHECK(rel_err(b, factorial(m) * k(p, m)) < 1e-12);
        }
}
