#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <limits>

#include "fracount/detail/real_traits.hpp"

namespace fracount::detail {

// Last-resort working precisions for sums whose cancellation exceeds
// binary128. Fixed digit counts keep them thread-safe (the dynamic MPFR type
// shares one process-wide precision setting).
template <unsigned Digits10>
using mp_real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<Digits10, boost::multiprecision::allocate_stack>,
    boost::multiprecision::et_off>;

using mp50 = mp_real<50>;
using mp100 = mp_real<100>;
using mp200 = mp_real<200>;

template <unsigned D>
struct RealTraits<mp_real<D>> {
    using R = mp_real<D>;
    static R epsilon() { return std::numeric_limits<R>::epsilon(); }
    static R abs(const R& x) { return boost::multiprecision::abs(x); }
    static R exp(const R& x) { return boost::multiprecision::exp(x); }
    static R log(const R& x) { return boost::multiprecision::log(x); }
    static R lgamma(const R& x) { return boost::multiprecision::lgamma(x); }
    static bool finite(const R& x) { return boost::multiprecision::isfinite(x); }
    static constexpr const char* name() { return "mpfr"; }
};

template <class Real>
constexpr bool is_mp_v = false;
template <unsigned D>
constexpr bool is_mp_v<mp_real<D>> = true;

/// Converts through a double-double split of the mantissa (106 bits), so
/// values outside double range survive.
template <class Real>
Real from_quad(quad q) {
    if constexpr (is_mp_v<Real>) {
        int exponent = 0;
        const quad mantissa = frexpq(q, &exponent);
        const double hi = static_cast<double>(mantissa);
        const double lo = static_cast<double>(mantissa - hi);
        return boost::multiprecision::ldexp(Real(hi) + Real(lo), exponent);
    } else {
        return static_cast<Real>(q);
    }
}

template <class Real>
double to_double(const Real& x) {
    if constexpr (is_mp_v<Real>)
        return x.template convert_to<double>();
    else
        return static_cast<double>(x);
}

}  // namespace fracount::detail
