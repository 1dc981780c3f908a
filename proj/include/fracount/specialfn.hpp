#pragma once

#include "fracount/errors.hpp"
#include "fracount/params.hpp"

namespace fracount {

/// ln Gamma(x) for x > 0; DomainError otherwise.
double log_gamma(double x);

struct KsCoefficient {
    double value;      ///< K_n, or 0.0 when it underflows double
    double log_value;  ///< ln K_n, always finite
    bool underflow;
};

/// K_n = prod_{k=0}^{n-1} Gamma(k rho + beta + 1) / Gamma(k rho + rho + 1), K_0 = 1.
///
/// Accumulated in binary128 log space and exponentiated once.
KsCoefficient ks_series_coeff(const FractalityParams& params, int n);

struct CoefficientRatio {
    double from_coefficients;  ///< K_{n+1} / K_n
    double from_gamma;         ///< Gamma(n rho + beta + 1) / Gamma(n rho + rho + 1)
};

/// Both sides of the coefficient recurrence; they must agree to rel_tol.
CoefficientRatio ks_coeff_ratio_check(const FractalityParams& params, int n);

/// E_{mu, 1+beta/mu, beta/mu}(z) = sum_n K_n z^n.
///
/// Compensated summation, stopping after three consecutive terms below
/// rel_tol * |partial sum|. Work escalates from double to long double to
/// binary128 while the cancellation estimate exceeds rel_tol * |result|;
/// PrecisionLossError if binary128 is not enough either. |z| must not exceed
/// cfg.z_abs_max (DomainError).
double kilbas_saigo(const FractalityParams& params, double z, const SeriesConfig& cfg = {});

/// d^order/dz^order of kilbas_saigo: sum_m ((m+order)!/m!) K_{m+order} z^m.
double kilbas_saigo_deriv(const FractalityParams& params, int order, double z,
                          const SeriesConfig& cfg = {});

/// One-parameter Mittag-Leffler function sum_n z^n / Gamma(mu n + 1), 0 < mu <= 1.
///
/// Terms are evaluated independently from ln Gamma, not from the
/// Kilbas-Saigo coefficient cache.
double mittag_leffler(double mu, double z, const SeriesConfig& cfg = {});

/// Two-parameter Mittag-Leffler function sum_n z^n / Gamma(mu n + nu), mu, nu > 0.
double mittag_leffler2(double mu, double nu, double z, const SeriesConfig& cfg = {});

}  // namespace fracount
