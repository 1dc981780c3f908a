#pragma once

#include <algorithm>
#include <sstream>
#include <string>

#include "fracount/detail/multiprecision.hpp"
#include "fracount/detail/real_traits.hpp"
#include "fracount/errors.hpp"
#include "fracount/params.hpp"

namespace fracount::detail {

/// Neumaier's variant of Kahan summation: the running compensation also
/// captures the low-order bits when the addend is larger than the sum.
template <class Real>
class CompensatedSum {
public:
    void add(Real x) {
        using T = RealTraits<Real>;
        const Real t = sum_ + x;
        if (T::abs(sum_) >= T::abs(x))
            compensation_ += (sum_ - t) + x;
        else
            compensation_ += (x - t) + sum_;
        sum_ = t;
    }

    Real value() const { return sum_ + compensation_; }

private:
    Real sum_{0};
    Real compensation_{0};
};

template <class Real>
struct SeriesTerm {
    Real value;
    /// Bound on the relative rounding error already carried by `value`,
    /// in units of epsilon.
    Real weight;
};

template <class Real>
struct SeriesSum {
    Real value{0};
    /// epsilon * (largest partial sum + sum of weighted |terms|).
    Real error_estimate{0};
    Real last_term{0};
    int terms = 0;
    bool converged = false;
    bool finite = true;
};

/// Sums next(0), next(1), ... until three consecutive terms are below
/// rel_tol * |partial sum| (or abs_tol), or max_terms is reached.
template <class Real, class NextTerm>
SeriesSum<Real> sum_series(NextTerm&& next, const SeriesConfig& cfg) {
    using T = RealTraits<Real>;
    const Real rel_tol = static_cast<Real>(cfg.rel_tol);
    const Real abs_tol = static_cast<Real>(cfg.abs_tol);

    CompensatedSum<Real> acc;
    Real max_partial{0};
    Real weighted{0};
    int small = 0;
    SeriesSum<Real> out;
    for (int m = 0; m < cfg.max_terms; ++m) {
        const SeriesTerm<Real> term = next(m);
        if (!T::finite(term.value)) {
            out.finite = false;
            out.terms = m;
            return out;
        }
        acc.add(term.value);
        const Real partial = acc.value();
        const Real mag = T::abs(term.value);
        max_partial = std::max(max_partial, T::abs(partial));
        weighted += term.weight * mag;
        out.last_term = mag;
        if (mag <= rel_tol * T::abs(partial) || mag <= abs_tol) {
            if (++small == 3) {
                out.converged = true;
                out.terms = m + 1;
                break;
            }
        } else {
            small = 0;
        }
    }
    if (!out.converged) out.terms = cfg.max_terms;
    out.value = acc.value();
    out.finite = T::finite(out.value);
    out.error_estimate = T::epsilon() * (max_partial + weighted);
    return out;
}

/// accept_abs is an extra absolute floor for the accuracy check only (it
/// never shortens the summation).
template <class Real>
bool meets_tolerance(const SeriesSum<Real>& s, const SeriesConfig& cfg, double accept_abs = 0.0) {
    using T = RealTraits<Real>;
    const Real bound = std::max(static_cast<Real>(cfg.rel_tol) * T::abs(s.value),
                                static_cast<Real>(std::max(cfg.abs_tol, accept_abs)));
    return s.error_estimate <= bound;
}

/// Runs `eval` in double, then long double, then binary128, then MPFR at
/// 50/100/200 digits until the cancellation estimate fits the tolerance.
/// `eval` is called with a value-initialised tag of the working type and
/// returns SeriesSum of it. The MPFR tiers are sized from the binary128
/// shortfall, so they only run when that tier loses the result.
template <class Eval>
double evaluate_tiered(const std::string& what, const SeriesConfig& cfg, Eval&& eval,
                       double accept_abs = 0.0) {
    auto fail_convergence = [&](auto const& s) {
        std::ostringstream msg;
        msg << what << ": series did not converge within " << cfg.max_terms
            << " terms (last |term| = " << to_double(s.last_term) << ")";
        throw ConvergenceError(msg.str(), to_double(s.last_term), s.terms);
    };
    auto bound_for = [&](double value) {
        return std::max({cfg.rel_tol * std::fabs(value), cfg.abs_tol, accept_abs});
    };
    auto finish = [&](double v) {
        if (!std::isfinite(v)) throw RangeError(what + ": result overflows double");
        return v;
    };

    const SeriesSum<double> d = eval(double{});
    if (d.finite && !d.converged) fail_convergence(d);
    if (d.finite && meets_tolerance(d, cfg, accept_abs)) return d.value;

    // long double buys ~11 bits; skip it when the shortfall is larger.
    bool try_extended = true;
    if (d.finite) try_extended = d.error_estimate < 256.0 * bound_for(d.value);
    if (try_extended) {
        const SeriesSum<long double> e = eval(static_cast<long double>(0));
        if (e.finite && !e.converged) fail_convergence(e);
        if (e.finite && meets_tolerance(e, cfg, accept_abs)) return finish(static_cast<double>(e.value));
    }

    const SeriesSum<quad> q = eval(quad{0});
    if (!q.finite) throw RangeError(what + ": series terms overflow");
    if (!q.converged) fail_convergence(q);
    if (meets_tolerance(q, cfg, accept_abs)) return finish(static_cast<double>(q.value));

    double value = static_cast<double>(q.value);
    double error = static_cast<double>(q.error_estimate);
    // Decimal digits the next tier needs: current digits plus the shortfall.
    auto needed = [&](double digits) { return digits + std::log10(error / bound_for(value)) + 4; };
    double need = needed(33);
    auto attempt = [&](auto tag, double digits) {
        using Real = decltype(tag);
        if (need > digits) return false;
        const SeriesSum<Real> r = eval(Real(0));
        if (!r.finite || !r.converged) return false;
        value = to_double(r.value);
        error = to_double(r.error_estimate);
        if (meets_tolerance(r, cfg, accept_abs)) return true;
        need = needed(digits - 1);
        return false;
    };
    if (attempt(mp50(0), 50) || attempt(mp100(0), 100) || attempt(mp200(0), 200)) return finish(value);

    std::ostringstream msg;
    msg << what << ": cancellation error estimate " << error
        << " exceeds rel_tol * |result| (result " << value << ")";
    throw PrecisionLossError(msg.str(), error, value);
}

}  // namespace fracount::detail
