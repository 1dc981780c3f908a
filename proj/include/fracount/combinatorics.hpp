#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <utility>
#include <vector>

#include "fracount/params.hpp"

namespace fracount {

using BigInt = boost::multiprecision::cpp_int;

/// Exact Stirling numbers S(m,l) (second kind) and s(m,l) (first kind,
/// signed) for 0 <= l, m <= cap, filled by the row recurrences
///   S(m+1,l) = l S(m,l) + S(m,l-1),   s(m+1,l) = s(m,l-1) - m s(m,l).
class StirlingTable {
public:
    static constexpr int kDefaultCap = 30;

    explicit StirlingTable(int cap = kDefaultCap);

    int cap() const noexcept { return cap_; }

    /// UnsupportedError above cap; zero for l > m.
    const BigInt& second_kind(int m, int l) const;
    const BigInt& first_kind_signed(int m, int l) const;

private:
    void check(int m, int l) const;

    int cap_;
    std::vector<std::vector<BigInt>> second_;
    std::vector<std::vector<BigInt>> first_;
};

/// Shared table with the default cap, built on first use.
const StirlingTable& stirling_table();

BigInt stirling2(int m, int l);
BigInt stirling1_signed(int m, int l);

/// S_{mu,beta}(m,l) = l! K_l S(m,l).
double frac_comb_number(const FractalityParams& params, int m, int l);

struct FracCombTable {
    FractalityParams params;
    int cap;
    /// values[m][l] for l <= m <= cap.
    std::vector<std::vector<double>> values;

    double at(int m, int l) const;
};

FracCombTable frac_comb_table(const FractalityParams& params, int cap = StirlingTable::kDefaultCap);

/// B_{mu,beta}(x,m) = sum_l S_{mu,beta}(m,l) x^l (finite sum, binary128 accumulation).
double frac_polynomial(const FractalityParams& params, double x, int m);

/// B_{mu,beta}(m) = B_{mu,beta}(1,m).
double frac_number(const FractalityParams& params, int m);

/// Generating function E(x (e^s - 1)) of the polynomials in s.
double poly_genfun(const FractalityParams& params, double s, double x, const SeriesConfig& cfg = {});

/// Orders accepted by the Stirling-number identities below (a larger shared
/// table is built on first use past the default cap).
constexpr int kIdentityMaxOrder = 200;

/// sum_{m<=m_max} z^m/m! sum_l s(m,l) B_{mu,beta}(l).
///
/// The inner sums cancel to m! K_m; they are evaluated in MPFR at a
/// precision sized from the magnitudes involved (up to 400 digits).
/// ConvergenceError unless the last two retained terms are below 1e-10
/// relative to the sum. Small mu needs a large m_max: K_m decays only
/// like (m!)^{-mu}.
double ks_via_stirling(const FractalityParams& params, double z, int m_max = 20);

/// (sum_l s(m,l) B_{mu,beta}(l), m! K_m) for m <= kIdentityMaxOrder.
std::pair<double, double> ks_identity_sides(const FractalityParams& params, int m);

/// (sum_l sum_r s(m,l) S_{mu,beta}(l,r), m! K_m).
std::pair<double, double> ks_identity_sides_comb(const FractalityParams& params, int m);

}  // namespace fracount
