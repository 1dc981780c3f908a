#include "fracount/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <cstdint>
#include <iterator>
#include <sstream>

#include "fracount/detail/coefficients.hpp"
#include "fracount/detail/ks_series.hpp"
#include "fracount/detail/multiprecision.hpp"
#include "fracount/specialfn.hpp"

namespace fracount {

using detail::quad;

namespace {

// Exact while |v| < 2^113, which covers every entry up to cap 30.
quad to_quad(const BigInt& v) {
    std::vector<std::uint64_t> limbs;
    const BigInt magnitude = abs(v);
    boost::multiprecision::export_bits(magnitude, std::back_inserter(limbs), 64);
    quad out = 0;
    for (std::uint64_t limb : limbs) out = out * 18446744073709551616.0Q + static_cast<quad>(limb);
    return v.sign() < 0 ? -out : out;
}

void check_order(int m, int cap) {
    if (m < 0) throw InvalidParameter("order m must be >= 0");
    if (m > cap) {
        std::ostringstream os;
        os << "order m = " << m << " exceeds the combinatorial cap " << cap;
        throw UnsupportedError(os.str());
    }
}

// S_{mu,beta}(m,l) in binary128.
quad frac_comb_q(const StirlingTable& table, const FractalityParams& params, int m, int l) {
    if (l > m) return 0;
    const BigInt& s = table.second_kind(m, l);
    if (s == 0) return 0;
    return expq(lgammaq(static_cast<quad>(l) + 1) + detail::ks_log_coeff(params, l)) * to_quad(s);
}

// B_{mu,beta}(x, m) in binary128.
quad frac_poly_q(const StirlingTable& table, const FractalityParams& params, quad x, int m) {
    quad sum = 0;
    quad power = 1;
    for (int l = 0; l <= m; ++l) {
        sum += frac_comb_q(table, params, m, l) * power;
        power *= x;
    }
    return sum;
}

quad m_factorial_k(const FractalityParams& params, int m) {
    return expq(lgammaq(static_cast<quad>(m) + 1) + detail::ks_log_coeff(params, m));
}

}  // namespace

StirlingTable::StirlingTable(int cap) : cap_(cap) {
    if (cap < 0) throw InvalidParameter("Stirling cap must be >= 0");
    second_.assign(cap + 1, std::vector<BigInt>(cap + 1));
    first_.assign(cap + 1, std::vector<BigInt>(cap + 1));
    second_[0][0] = 1;
    first_[0][0] = 1;
    for (int m = 0; m < cap; ++m) {
        for (int l = 1; l <= m + 1; ++l) {
            second_[m + 1][l] = l * second_[m][l] + second_[m][l - 1];
            first_[m + 1][l] = first_[m][l - 1] - m * first_[m][l];
        }
    }
}

void StirlingTable::check(int m, int l) const {
    check_order(m, cap_);
    if (l < 0) throw InvalidParameter("index l must be >= 0");
    if (l > cap_) check_order(l, cap_);
}

const BigInt& StirlingTable::second_kind(int m, int l) const {
    check(m, l);
    return second_[m][l];
}

const BigInt& StirlingTable::first_kind_signed(int m, int l) const {
    check(m, l);
    return first_[m][l];
}

const StirlingTable& stirling_table() {
    static const StirlingTable table;
    return table;
}

namespace {

// ---- Stirling-number identities ------------------------------------------
//
// sum_l s(m,l) B(l) collapses to m! K_m, so evaluating it literally cancels
// heavily: about 35 digits at m = 30 and 270 at m = 150 for mu = 1. The
// working precision is sized per call from exact magnitudes (Stirling
// numbers are integers, every S_{mu,beta}(l,r) is positive).

const StirlingTable& identity_table(int m_max) {
    if (m_max <= StirlingTable::kDefaultCap) return stirling_table();
    static const StirlingTable big(kIdentityMaxOrder);
    return big;
}

double log10_abs(const BigInt& v) {
    if (v == 0) return -std::numeric_limits<double>::infinity();
    const BigInt magnitude = abs(v);
    const unsigned bits = boost::multiprecision::msb(magnitude);
    if (bits < 1000) return std::log10(magnitude.convert_to<double>());
    return std::log10((magnitude >> (bits - 60)).convert_to<double>()) + (bits - 60) * std::log10(2.0);
}

struct IdentityPlan {
    const FractalityParams& params;
    const StirlingTable& table;
    int m_max;
    int digits;

    IdentityPlan(const FractalityParams& p, int m) : params(p), table(identity_table(m)), m_max(m) {
        // log10 of l! K_l, then upper bounds on B(l) and on the terms s(m,l) B(l).
        std::vector<double> lrk(m_max + 1);
        for (int r = 0; r <= m_max; ++r)
            lrk[r] = static_cast<double>((lgammaq(static_cast<quad>(r) + 1) + detail::ks_log_coeff(params, r)) /
                                         logq(10.0Q));
        std::vector<double> lb(m_max + 1, 0.0);
        for (int l = 1; l <= m_max; ++l) {
            double top = -std::numeric_limits<double>::infinity();
            for (int r = 1; r <= l; ++r) top = std::max(top, log10_abs(table.second_kind(l, r)) + lrk[r]);
            lb[l] = top + std::log10(l + 1.0);
        }
        double worst = 0;
        for (int mm = 1; mm <= m_max; ++mm) {
            double top = -std::numeric_limits<double>::infinity();
            for (int l = 0; l <= mm; ++l) top = std::max(top, log10_abs(table.first_kind_signed(mm, l)) + lb[l]);
            worst = std::max(worst, top + std::log10(mm + 1.0) - lrk[mm]);
        }
        digits = static_cast<int>(std::ceil(worst)) + 25;
    }

    template <class F>
    double dispatch(const char* what, F&& f) const {
        if (digits <= 50) return f(detail::mp50(0));
        if (digits <= 100) return f(detail::mp100(0));
        if (digits <= 200) return f(detail::mp200(0));
        if (digits <= 400) return f(detail::mp_real<400>(0));
        std::ostringstream os;
        os << what << ": cancellation needs " << digits << " digits";
        throw PrecisionLossError(os.str(), NAN, NAN);
    }
};

template <class Real>
Real to_real(const BigInt& v) {
    return Real(v.str());
}

// sum_l s(m,l) B(l) for m = 0..m_max; with `nested` the fractional Bell
// numbers are not formed and the double sum over S_{mu,beta}(l,r) is taken.
template <class Real>
std::vector<Real> identity_left(const IdentityPlan& plan, bool nested) {
    const int n = plan.m_max;
    const Real beta(plan.params.beta());
    const Real rho = Real(plan.params.mu()) + beta;
    std::vector<Real> rk(n + 1);  // r! K_r
    rk[0] = 1;
    for (int r = 0; r < n; ++r) {
        const Real rr = Real(r) * rho;
        rk[r + 1] = rk[r] * (r + 1) * exp(lgamma(rr + beta + 1) - lgamma(rr + rho + 1));
    }
    auto comb = [&](int l, int r) { return to_real<Real>(plan.table.second_kind(l, r)) * rk[r]; };

    std::vector<Real> bell(n + 1);
    if (!nested)
        for (int l = 0; l <= n; ++l) {
            bell[l] = 0;
            for (int r = 0; r <= l; ++r) bell[l] += comb(l, r);
        }

    std::vector<Real> out(n + 1);
    for (int m = 0; m <= n; ++m) {
        Real sum = 0;
        for (int l = 0; l <= m; ++l) {
            const Real s = to_real<Real>(plan.table.first_kind_signed(m, l));
            if (nested)
                for (int r = 0; r <= l; ++r) sum += s * comb(l, r);
            else
                sum += s * bell[l];
        }
        out[m] = sum;
    }
    return out;
}

}  // namespace

BigInt stirling2(int m, int l) { return stirling_table().second_kind(m, l); }

BigInt stirling1_signed(int m, int l) { return stirling_table().first_kind_signed(m, l); }

double frac_comb_number(const FractalityParams& params, int m, int l) {
    const auto& table = stirling_table();
    check_order(m, table.cap());
    if (l < 0) throw InvalidParameter("index l must be >= 0");
    return static_cast<double>(frac_comb_q(table, params, m, l));
}

double FracCombTable::at(int m, int l) const {
    check_order(m, cap);
    if (l < 0) throw InvalidParameter("index l must be >= 0");
    return l > m ? 0.0 : values[m][l];
}

FracCombTable frac_comb_table(const FractalityParams& params, int cap) {
    const StirlingTable local(cap);
    FracCombTable out{params, cap, {}};
    out.values.resize(cap + 1);
    for (int m = 0; m <= cap; ++m)
        for (int l = 0; l <= m; ++l)
            out.values[m].push_back(static_cast<double>(frac_comb_q(local, params, m, l)));
    return out;
}

double frac_polynomial(const FractalityParams& params, double x, int m) {
    const auto& table = stirling_table();
    check_order(m, table.cap());
    return static_cast<double>(frac_poly_q(table, params, x, m));
}

double frac_number(const FractalityParams& params, int m) { return frac_polynomial(params, 1.0, m); }

double poly_genfun(const FractalityParams& params, double s, double x, const SeriesConfig& cfg) {
    return kilbas_saigo(params, x * std::expm1(s), cfg);
}

double ks_via_stirling(const FractalityParams& params, double z, int m_max) {
    check_order(m_max, kIdentityMaxOrder);
    if (!std::isfinite(z)) throw InvalidParameter("z must be finite");
    if (z == 0.0) return 1.0;

    const IdentityPlan plan(params, m_max);
    return plan.dispatch("ks_via_stirling", [&](auto tag) {
        using Real = decltype(tag);
        const std::vector<Real> left = identity_left<Real>(plan, false);
        Real sum = 0;
        Real scale = 1;  // z^m / m!
        std::vector<Real> terms;
        for (int m = 0; m <= m_max; ++m) {
            if (m > 0) scale *= Real(z) / m;
            terms.push_back(scale * left[m]);
            sum += terms.back();
        }
        const Real tol = Real(1e-10) * abs(sum);
        const Real last = abs(terms[m_max]);
        const Real prev = m_max > 0 ? abs(terms[m_max - 1]) : Real(0);
        if (last > tol || prev > tol) {
            std::ostringstream os;
            os << "ks_via_stirling: truncation at m_max = " << m_max << " has not stabilized (last term "
               << last.template convert_to<double>() << ", sum " << sum.template convert_to<double>() << ")";
            throw ConvergenceError(os.str(), last.template convert_to<double>(), m_max + 1);
        }
        return sum.template convert_to<double>();
    });
}

std::pair<double, double> ks_identity_sides(const FractalityParams& params, int m) {
    check_order(m, kIdentityMaxOrder);
    const IdentityPlan plan(params, m);
    const double left = plan.dispatch("ks_identity_sides", [&](auto tag) {
        return identity_left<decltype(tag)>(plan, false)[m].template convert_to<double>();
    });
    return {left, static_cast<double>(m_factorial_k(params, m))};
}

std::pair<double, double> ks_identity_sides_comb(const FractalityParams& params, int m) {
    check_order(m, kIdentityMaxOrder);
    const IdentityPlan plan(params, m);
    const double left = plan.dispatch("ks_identity_sides_comb", [&](auto tag) {
        return identity_left<decltype(tag)>(plan, true)[m].template convert_to<double>();
    });
    return {left, static_cast<double>(m_factorial_k(params, m))};
}

}  // namespace fracount
