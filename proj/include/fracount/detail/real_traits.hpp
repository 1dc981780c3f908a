#pragma once

#include <quadmath.h>

#include <cfloat>
#include <cmath>

namespace fracount::detail {

using quad = __float128;

// Uniform spelling of the handful of elementary functions the series kernels
// need, for each working precision.
template <class Real>
struct RealTraits;

template <>
struct RealTraits<double> {
    static constexpr double epsilon() { return DBL_EPSILON; }
    static double abs(double x) { return std::fabs(x); }
    static double exp(double x) { return std::exp(x); }
    static double log(double x) { return std::log(x); }
    static double lgamma(double x) { return std::lgamma(x); }
    static bool finite(double x) { return std::isfinite(x); }
    static constexpr const char* name() { return "double"; }
};

template <>
struct RealTraits<long double> {
    static constexpr long double epsilon() { return LDBL_EPSILON; }
    static long double abs(long double x) { return std::fabs(x); }
    static long double exp(long double x) { return std::exp(x); }
    static long double log(long double x) { return std::log(x); }
    static long double lgamma(long double x) { return std::lgamma(x); }
    static bool finite(long double x) { return std::isfinite(x); }
    static constexpr const char* name() { return "long double"; }
};

template <>
struct RealTraits<quad> {
    static quad epsilon() { return FLT128_EPSILON; }
    static quad abs(quad x) { return fabsq(x); }
    static quad exp(quad x) { return expq(x); }
    static quad log(quad x) { return logq(x); }
    static quad lgamma(quad x) { return lgammaq(x); }
    static bool finite(quad x) { return finiteq(x) != 0; }
    static constexpr const char* name() { return "binary128"; }
};

}  // namespace fracount::detail
