#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <vector>

#include "fracount/detail/real_traits.hpp"
#include "fracount/params.hpp"

namespace fracount::detail {

/// Immutable snapshot of the Kilbas-Saigo coefficients
///   K_n = prod_{k<n} Gamma(k rho + beta + 1) / Gamma(k rho + rho + 1)
/// for n = 0..size(). Everything is built in binary128 log space; the ratios
/// are then rounded once to each working precision.
struct KsCoefficientData {
    std::vector<quad> log_coeff;     // log K_n, n = 0..size()
    std::vector<quad> ratio_q;       // K_{n+1} / K_n, n = 0..size()-1
    std::vector<long double> ratio_ld;
    std::vector<double> ratio_d;

    std::size_t size() const { return ratio_q.size(); }

    template <class Real>
    const Real* ratios() const;
};

template <>
inline const double* KsCoefficientData::ratios<double>() const { return ratio_d.data(); }
template <>
inline const long double* KsCoefficientData::ratios<long double>() const { return ratio_ld.data(); }
template <>
inline const quad* KsCoefficientData::ratios<quad>() const { return ratio_q.data(); }

/// Memo of K_n for one parameter pair. Growth swaps in a new snapshot under
/// the lock, so readers holding an older snapshot are never invalidated.
class KsCoefficients {
public:
    explicit KsCoefficients(FractalityParams params);

    /// Snapshot with at least `n` ratios (coefficients K_0..K_n).
    std::shared_ptr<const KsCoefficientData> at_least(std::size_t n) const;

    const FractalityParams& params() const { return params_; }

private:
    FractalityParams params_;
    mutable std::mutex mutex_;
    mutable std::shared_ptr<const KsCoefficientData> data_;
};

/// Process-wide registry keyed on the exact bits of (mu, beta).
std::shared_ptr<const KsCoefficients> ks_coefficients(const FractalityParams& params);

}  // namespace fracount::detail
