#include "fracount/specialfn.hpp"

#include <cfloat>
#include <cmath>
#include <map>
#include <utility>
#include <vector>
#include <sstream>
#include <type_traits>

#include "fracount/detail/coefficients.hpp"
#include "fracount/detail/ks_series.hpp"
#include "fracount/detail/series.hpp"

namespace fracount {

using detail::quad;
using detail::RealTraits;
using detail::SeriesSum;
using detail::SeriesTerm;

namespace {

void check_domain(double z, const SeriesConfig& cfg, const char* what) {
    cfg.validate();
    if (!std::isfinite(z) || std::fabs(z) > cfg.z_abs_max) {
        std::ostringstream os;
        os << what << ": |z| = " << std::fabs(z) << " exceeds z_abs_max = " << cfg.z_abs_max
           << " (alternating-series cancellation region)";
        throw DomainError(os.str());
    }
}

}  // namespace

namespace detail {

namespace {

// Coefficient ratios K_{k+1}/K_k at MPFR precision, grown on demand per
// thread (the shared cache stops at binary128).
template <class Real>
class MpRatios {
public:
    explicit MpRatios(const FractalityParams& params) {
        thread_local std::map<std::pair<double, double>, std::vector<Real>> cache;
        if (cache.size() > 256) cache.clear();
        values_ = &cache[{params.mu(), params.beta()}];
        beta_ = Real(params.beta());
        rho_ = Real(params.mu()) + beta_;
    }

    const Real& operator[](std::size_t k) {
        using T = RealTraits<Real>;
        while (values_->size() <= k) {
            const Real kr = Real(static_cast<unsigned>(values_->size())) * rho_;
            values_->push_back(T::exp(T::lgamma(kr + beta_ + 1) - T::lgamma(kr + rho_ + 1)));
        }
        return (*values_)[k];
    }

private:
    std::vector<Real>* values_;
    Real beta_;
    Real rho_;
};

}  // namespace

quad ks_log_coeff(const FractalityParams& params, int n) {
    if (n < 0) throw InvalidParameter("coefficient index must be >= 0");
    auto data = ks_coefficients(params)->at_least(static_cast<std::size_t>(n));
    return data->log_coeff[static_cast<std::size_t>(n)];
}

double ks_shifted_series(const FractalityParams& params, double z, int offset, quad log_start,
                         const SeriesConfig& cfg, const std::string& what, double accept_abs) {
    const quad start = expq(log_start);
    if (z == 0.0) return static_cast<double>(start);

    auto data = ks_coefficients(params)->at_least(static_cast<std::size_t>(offset) +
                                                  static_cast<std::size_t>(cfg.max_terms) + 1);
    return evaluate_tiered(what, cfg, [&](auto tag) {
        using Real = decltype(tag);
        const Real zr = static_cast<Real>(z);
        Real term = from_quad<Real>(start);
        if constexpr (is_mp_v<Real>) {
            MpRatios<Real> ratio(params);
            return detail::sum_series<Real>(
                [&](int m) {
                    if (m > 0) {
                        const int k = m - 1;
                        term *= zr * (Real(k + offset + 1) / Real(k + 1)) *
                                ratio[static_cast<std::size_t>(k + offset)];
                    }
                    return SeriesTerm<Real>{term, Real(1 + 2 * m)};
                },
                cfg);
        } else {
            const Real* ratio = data->template ratios<Real>() + offset;
            if constexpr (!std::is_same_v<Real, quad>) {
                // A start that underflows here is representable one tier up.
                if (start != 0 && term == 0) {
                    SeriesSum<Real> lost;
                    lost.finite = false;
                    return lost;
                }
            }
            return detail::sum_series<Real>(
                [&](int m) {
                    if (m > 0) {
                        const int k = m - 1;
                        term *= zr * (static_cast<Real>(k + offset + 1) / static_cast<Real>(k + 1)) *
                                ratio[k];
                    }
                    // start rounding plus ~two roundings per recurrence step
                    return SeriesTerm<Real>{term, static_cast<Real>(1 + 2 * m)};
                },
                cfg);
        }
    }, accept_abs);
}

}  // namespace detail

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        std::ostringstream os;
        os << "log_gamma: argument must be a finite positive number (got " << x << ")";
        throw DomainError(os.str());
    }
    return std::lgamma(x);
}

KsCoefficient ks_series_coeff(const FractalityParams& params, int n) {
    const quad log_k = detail::ks_log_coeff(params, n);
    const double value = static_cast<double>(expq(log_k));
    const bool underflow = value < DBL_MIN;
    return {underflow ? 0.0 : value, static_cast<double>(log_k), underflow};
}

CoefficientRatio ks_coeff_ratio_check(const FractalityParams& params, int n) {
    if (n < 0) throw InvalidParameter("coefficient index must be >= 0");
    const quad lo = detail::ks_log_coeff(params, n);
    const quad hi = detail::ks_log_coeff(params, n + 1);
    const double nr = n * params.rho();
    const double direct =
        std::exp(log_gamma(nr + params.beta() + 1.0) - log_gamma(nr + params.rho() + 1.0));
    return {static_cast<double>(expq(hi - lo)), direct};
}

double kilbas_saigo(const FractalityParams& params, double z, const SeriesConfig& cfg) {
    check_domain(z, cfg, "kilbas_saigo");
    return detail::ks_shifted_series(params, z, 0, 0, cfg, "kilbas_saigo");
}

double kilbas_saigo_deriv(const FractalityParams& params, int order, double z,
                          const SeriesConfig& cfg) {
    if (order < 0) throw InvalidParameter("derivative order must be >= 0");
    check_domain(z, cfg, "kilbas_saigo_deriv");
    const quad log_start = lgammaq(static_cast<quad>(order) + 1) + detail::ks_log_coeff(params, order);
    return detail::ks_shifted_series(params, z, order, log_start, cfg, "kilbas_saigo_deriv");
}

double mittag_leffler2(double mu, double nu, double z, const SeriesConfig& cfg) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidParameter("mu must be > 0");
    if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidParameter("nu must be > 0");
    check_domain(z, cfg, "mittag_leffler");

    return detail::evaluate_tiered("mittag_leffler", cfg, [&](auto tag) {
        using Real = decltype(tag);
        using T = RealTraits<Real>;
        const Real a = static_cast<Real>(mu);
        const Real b = static_cast<Real>(nu);
        const Real log_abs_z = z == 0.0 ? Real(0) : T::log(static_cast<Real>(std::fabs(z)));
        const bool alternating = z < 0.0;
        return detail::sum_series<Real>(
            [&](int m) {
                if (m > 0 && z == 0.0) return SeriesTerm<Real>{Real(0), Real(0)};
                const Real lg = T::lgamma(a * static_cast<Real>(m) + b);
                const Real log_power = static_cast<Real>(m) * log_abs_z;
                Real value = T::exp(log_power - lg);
                if (alternating && (m % 2 == 1)) value = -value;
                return SeriesTerm<Real>{value, 2 + T::abs(log_power) + T::abs(lg)};
            },
            cfg);
    });
}

double mittag_leffler(double mu, double z, const SeriesConfig& cfg) {
    if (!(mu > 0.0 && mu <= 1.0)) throw InvalidParameter("mu must satisfy 0 < mu <= 1");
    return mittag_leffler2(mu, 1.0, z, cfg);
}

}  // namespace fracount
