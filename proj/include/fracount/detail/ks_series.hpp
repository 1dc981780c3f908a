#pragma once

#include <string>

#include "fracount/detail/real_traits.hpp"
#include "fracount/params.hpp"

namespace fracount::detail {

/// sum_m t_m with t_0 = exp(log_start) and
///   t_{m+1} = t_m * z * (m + offset + 1) / (m + 1) * K_{m+offset+1} / K_{m+offset}.
///
/// With log_start = ln(offset! K_offset) this is the offset-th derivative of
/// the Kilbas-Saigo function; with log_start = offset ln x + ln K_offset and
/// z = -x it is the counting probability P(offset). The caller has already
/// checked |z| against the configured domain. accept_abs is an absolute
/// accuracy floor (probabilities need absolute, not relative, accuracy).
double ks_shifted_series(const FractalityParams& params, double z, int offset, quad log_start,
                         const SeriesConfig& cfg, const std::string& what, double accept_abs = 0.0);

/// ln K_n in binary128.
quad ks_log_coeff(const FractalityParams& params, int n);

}  // namespace fracount::detail
