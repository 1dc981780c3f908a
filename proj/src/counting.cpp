#include "fracount/counting.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracount/combinatorics.hpp"
#include "fracount/detail/ks_series.hpp"
#include "fracount/detail/series.hpp"
#include "fracount/specialfn.hpp"

namespace fracount {

using detail::quad;

namespace {

constexpr double kClampTol = 1e-10;
// Absolute accuracy floor for probabilities; tail values far below it only
// need to be accurate in absolute terms.
constexpr double kProbabilityAbsTol = 1e-15;

double checked_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidParameter("time must be finite and >= 0");
    return t;
}

double checked_scaled_time(const ProcessSpec& spec, double t, const SeriesConfig& cfg) {
    cfg.validate();
    const double x = spec.scaled_time(checked_time(t));
    if (x > cfg.z_abs_max) {
        std::ostringstream os;
        os << "lambda t^rho = " << x << " exceeds z_abs_max = " << cfg.z_abs_max;
        throw DomainError(os.str());
    }
    return x;
}

// Roundoff can push a quantity that is analytically in [0,1] slightly outside.
double clamp_probability(double v, const char* what) {
    if (v < 0.0) {
        if (v >= -kClampTol) return 0.0;
        std::ostringstream os;
        os << what << ": negative value " << v << " beyond roundoff tolerance";
        throw PrecisionLossError(os.str(), -v, v);
    }
    if (v > 1.0) {
        if (v <= 1.0 + kClampTol) return 1.0;
        std::ostringstream os;
        os << what << ": value " << v << " exceeds 1 beyond roundoff tolerance";
        throw PrecisionLossError(os.str(), v - 1.0, v);
    }
    return v;
}

quad scaled_time_q(const ProcessSpec& spec, double t) {
    if (t == 0.0) return 0;
    return static_cast<quad>(spec.rate) *
           powq(static_cast<quad>(t), static_cast<quad>(spec.params.mu()) + spec.params.beta());
}

}  // namespace

double pmf(const ProcessSpec& spec, double t, int n, const SeriesConfig& cfg) {
    if (n < 0) throw InvalidParameter("count n must be >= 0");
    const double x = checked_scaled_time(spec, t, cfg);
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    const quad log_start = n * logq(scaled_time_q(spec, t)) + detail::ks_log_coeff(spec.params, n);
    const double v = detail::ks_shifted_series(spec.params, -x, n, log_start, cfg, "pmf",
                                                   kProbabilityAbsTol);
    return clamp_probability(v, "pmf");
}

PMFTable pmf_table(const ProcessSpec& spec, double t, int n_max, const SeriesConfig& cfg) {
    if (n_max < 0) throw InvalidParameter("n_max must be >= 0");
    PMFTable out{spec, t, {}, 0.0};
    out.probs.reserve(n_max + 1);
    detail::CompensatedSum<double> total;
    for (int n = 0; n <= n_max; ++n) {
        out.probs.push_back(pmf(spec, t, n, cfg));
        total.add(out.probs.back());
    }
    out.tail_mass = 1.0 - total.value();
    if (out.tail_mass < -1e-8) {
        std::ostringstream os;
        os << "pmf_table: probabilities sum to 1 + " << -out.tail_mass;
        throw PrecisionLossError(os.str(), -out.tail_mass, total.value());
    }
    return out;
}

PMFTable pmf_table_auto(const ProcessSpec& spec, double t, const SeriesConfig& cfg, int cap) {
    if (cap < 0) throw InvalidParameter("cap must be >= 0");
    PMFTable out{spec, t, {}, 0.0};
    detail::CompensatedSum<double> total;
    double peak = 0.0;
    int small = 0;
    for (int n = 0; n <= cap; ++n) {
        const double p = pmf(spec, t, n, cfg);
        out.probs.push_back(p);
        total.add(p);
        peak = std::max(peak, p);
        small = p < 1e-12 * peak ? small + 1 : 0;
        if (small == 5) break;
    }
    out.tail_mass = 1.0 - total.value();
    if (out.tail_mass < -1e-8) {
        std::ostringstream os;
        os << "pmf_table: probabilities sum to 1 + " << -out.tail_mass;
        throw PrecisionLossError(os.str(), -out.tail_mass, total.value());
    }
    return out;
}

double survival_zero(const ProcessSpec& spec, double t, const SeriesConfig& cfg) {
    const double x = checked_scaled_time(spec, t, cfg);
    if (x == 0.0) return 1.0;
    const double v = detail::ks_shifted_series(spec.params, -x, 0, 0, cfg, "survival_zero",
                                               kProbabilityAbsTol);
    return clamp_probability(v, "survival_zero");
}

double pgf(const ProcessSpec& spec, double t, double s, const SeriesConfig& cfg) {
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidParameter("pgf argument s must lie in [0, 1]");
    const double x = spec.scaled_time(checked_time(t));
    if (x == 0.0 || s == 1.0) return 1.0;
    return kilbas_saigo(spec.params, x * (s - 1.0), cfg);
}

double mgf(const ProcessSpec& spec, double t, double s, const SeriesConfig& cfg) {
    if (!std::isfinite(s)) throw InvalidParameter("mgf argument s must be finite");
    const double x = spec.scaled_time(checked_time(t));
    if (x == 0.0 || s == 0.0) return 1.0;
    return kilbas_saigo(spec.params, x * std::expm1(-s), cfg);
}

double mean(const ProcessSpec& spec, double t) {
    const double x = spec.scaled_time(checked_time(t));
    const auto& p = spec.params;
    return std::exp(log_gamma(p.beta() + 1.0) - log_gamma(p.rho() + 1.0)) * x;
}

double raw_moment(const ProcessSpec& spec, double t, int m) {
    if (m < 1) throw InvalidParameter("moment order must be >= 1");
    if (m > 8) throw UnsupportedError("raw moments are supported up to order 8");
    const double x = spec.scaled_time(checked_time(t));
    double sum = 0.0;
    double power = x;
    for (int l = 1; l <= m; ++l) {
        sum += frac_comb_number(spec.params, m, l) * power;
        power *= x;
    }
    return sum;
}

double central_moment(const ProcessSpec& spec, double t, int m) {
    if (m < 1) throw InvalidParameter("moment order must be >= 1");
    if (m > 4) throw UnsupportedError("central moments are supported up to order 4");
    if (m == 1) return 0.0;
    checked_time(t);

    const quad log_k1 = detail::ks_log_coeff(spec.params, 1);
    auto q = [&](int j) { return expq(detail::ks_log_coeff(spec.params, j) - j * log_k1); };
    const quad mu = expq(log_k1) * scaled_time_q(spec, t);
    const quad q2 = q(2);
    quad v = 0;
    if (m == 2) {
        v = (2 * q2 - 1) * mu * mu + mu;
    } else if (m == 3) {
        const quad q3 = q(3);
        v = ((6 * q3 - 6 * q2 + 2) * mu + (6 * q2 - 3)) * mu * mu + mu;
    } else {
        const quad q3 = q(3);
        const quad q4 = q(4);
        v = (((24 * q4 - 24 * q3 + 12 * q2 - 3) * mu + (36 * q3 - 24 * q2 + 6)) * mu +
             (14 * q2 - 4)) * mu * mu +
            mu;
    }
    return static_cast<double>(v);
}

double variance(const ProcessSpec& spec, double t) { return central_moment(spec, t, 2); }

namespace {
double positive_variance(const ProcessSpec& spec, double t, const char* what) {
    const double var = variance(spec, t);
    if (!(var > 0.0))
        throw DegenerateDistributionError(std::string(what) + ": variance is zero (t = 0)");
    return var;
}
}  // namespace

double skewness(const ProcessSpec& spec, double t) {
    const double var = positive_variance(spec, t, "skewness");
    return central_moment(spec, t, 3) / std::pow(var, 1.5);
}

double kurtosis_excess(const ProcessSpec& spec, double t) {
    const double var = positive_variance(spec, t, "kurtosis_excess");
    return central_moment(spec, t, 4) / (var * var) - 3.0;
}

MomentSet moment_set(const ProcessSpec& spec, double t) {
    MomentSet out{};
    for (int m = 1; m <= 4; ++m) {
        out.raw[m - 1] = raw_moment(spec, t, m);
        out.central[m - 1] = central_moment(spec, t, m);
    }
    out.variance = out.central[1];
    if (out.variance > 0.0) {
        out.skewness = out.central[2] / std::pow(out.variance, 1.5);
        out.kurtosis_excess = out.central[3] / (out.variance * out.variance) - 3.0;
    } else {
        out.skewness = std::nan("");
        out.kurtosis_excess = std::nan("");
    }
    return out;
}

double interarrival_pdf(const ProcessSpec& spec, double tau, const SeriesConfig& cfg) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("interarrival time must be > 0");
    const double x = checked_scaled_time(spec, tau, cfg);
    const double rho = spec.params.rho();
    double d = kilbas_saigo_deriv(spec.params, 1, -x, cfg);
    if (d < 0.0) {
        if (d < -kClampTol) {
            std::ostringstream os;
            os << "interarrival_pdf: negative density factor " << d;
            throw PrecisionLossError(os.str(), -d, d);
        }
        d = 0.0;
    }
    return rho * spec.rate * std::pow(tau, rho - 1.0) * d;
}

LaplaceSeriesResult interarrival_laplace_series(const ProcessSpec& spec, double u, int max_terms) {
    if (!(u > 0.0) || !std::isfinite(u)) throw InvalidParameter("Laplace argument u must be > 0");
    if (max_terms < 1) throw InvalidParameter("terms must be >= 1");

    const quad rho = static_cast<quad>(spec.params.mu()) + spec.params.beta();
    const quad step = logq(static_cast<quad>(spec.rate)) - rho * logq(static_cast<quad>(u));
    auto term = [&](int l) {
        const quad l1 = l + 1;
        const quad log_mag = logq(rho) + logq(l1) + l1 * step + lgammaq(rho * l1) +
                             detail::ks_log_coeff(spec.params, l + 1);
        const quad mag = expq(log_mag);
        return (l % 2 == 0) ? mag : -mag;
    };

    quad sum = term(0);
    quad prev = sum;
    for (int l = 1; l <= max_terms; ++l) {
        const quad t = term(l);
        if (l == max_terms) return {static_cast<double>(sum), static_cast<double>(fabsq(t)), l};
        if (fabsq(t) >= fabsq(prev)) {
            if (l == 1 && fabsq(t) > fabsq(prev)) {
                std::ostringstream os;
                os << "interarrival_laplace_series: terms grow from the start at u = " << u
                   << "; use the quadrature form";
                throw AsymptoticSeriesError(os.str());
            }
            return {static_cast<double>(sum + t / 2), static_cast<double>(fabsq(t)), l};
        }
        if (fabsq(t) <= 1e-20Q * fabsq(sum)) {
            return {static_cast<double>(sum + t), static_cast<double>(fabsq(t)), l + 1};
        }
        sum += t;
        prev = t;
    }
    return {static_cast<double>(sum), static_cast<double>(fabsq(prev)), max_terms};
}

double interarrival_laplace_quadrature(const ProcessSpec& spec, double u, const SeriesConfig& cfg) {
    if (!(u > 0.0) || !std::isfinite(u)) throw InvalidParameter("Laplace argument u must be > 0");
    cfg.validate();
    const auto& params = spec.params;
    const double lambda = spec.rate;
    const double rho = params.rho();

    // In v = tau^rho the measure psi(tau) d tau becomes lambda E'(-lambda v) dv.
    auto density = [&](double v) { return lambda * kilbas_saigo_deriv(params, 1, -lambda * v, cfg); };
    auto evaluable = [&](double v) {
        try {
            density(v);
            return true;
        } catch (const NumericError&) {
            return false;
        }
    };

    const double t_full = std::log(1e14) / u;
    double v_max = std::min(std::pow(t_full, rho), cfg.z_abs_max / lambda);
    int backoff = 0;
    while (!evaluable(v_max)) {
        if (++backoff > 200) throw IntegrationError("interarrival_laplace_quadrature: density not evaluable");
        v_max *= 0.9;
    }
    // int_T^inf e^{-u tau} psi <= e^{-uT} P(0,T)
    const double tail = std::exp(-u * std::pow(v_max, 1.0 / rho)) *
                        kilbas_saigo(params, -lambda * v_max, cfg);
    if (tail > 1e-10) {
        std::ostringstream os;
        os << "interarrival_laplace_quadrature: truncation tail bound " << tail
           << " too large for u = " << u << "; the density is not evaluable past lambda v = " << lambda * v_max
           << " (raise SeriesConfig::z_abs_max to integrate further)";
        throw IntegrationError(os.str());
    }

    auto integrand = [&](double v) {
        if (v <= 0.0) return density(0.0);
        return std::exp(-u * std::pow(v, 1.0 / rho)) * density(v);
    };
    double err = 0.0;
    double value = 0.0;
    try {
        value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, v_max, 20,
                                                                                1e-12, &err);
    } catch (const NumericError& e) {
        throw IntegrationError(std::string("interarrival_laplace_quadrature: ") + e.what());
    }
    if (!std::isfinite(value) || err > 1e-10 * std::max(std::fabs(value), 1e-300) + tail) {
        std::ostringstream os;
        os << "interarrival_laplace_quadrature: error estimate " << err << " for value " << value;
        throw IntegrationError(os.str());
    }
    return value;
}

namespace {
void require_unit_mu(const ProcessSpec& spec, const char* what) {
    if (spec.params.mu() != 1.0)
        throw UnsupportedError(std::string(what) + " is defined only for mu = 1");
}
}  // namespace

double rate_function(const ProcessSpec& spec, double t) {
    require_unit_mu(spec, "rate_function");
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("rate_function needs t > 0");
    const double sigma = spec.params.sigma();
    return sigma * spec.rate * std::pow(t, sigma - 1.0);
}

double cumulative_rate(const ProcessSpec& spec, double t) {
    require_unit_mu(spec, "cumulative_rate");
    checked_time(t);
    return t == 0.0 ? 0.0 : spec.rate * std::pow(t, spec.params.sigma());
}

JumpDistribution JumpDistribution::degenerate(double value) {
    if (!std::isfinite(value)) throw InvalidParameter("degenerate jump value must be finite");
    return {"degenerate",
            [value](double s) { return std::exp(value * s); },
            [value](Rng&) { return value; },
            value};
}

JumpDistribution JumpDistribution::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidParameter("exponential jump rate must be > 0");
    return {"exponential",
            [rate](double s) {
                if (s >= rate) throw DomainError("exponential jump mgf diverges for s >= rate");
                return rate / (rate - s);
            },
            [rate](Rng& rng) { return std::exponential_distribution<double>(rate)(rng); },
            1.0 / rate};
}

JumpDistribution JumpDistribution::normal(double mean, double stddev) {
    if (!std::isfinite(mean) || !(stddev >= 0.0) || !std::isfinite(stddev))
        throw InvalidParameter("normal jump needs finite mean and stddev >= 0");
    return {"normal",
            [mean, stddev](double s) { return std::exp(mean * s + 0.5 * stddev * stddev * s * s); },
            [mean, stddev](Rng& rng) {
                return stddev == 0.0 ? mean : std::normal_distribution<double>(mean, stddev)(rng);
            },
            mean};
}

double compound_mgf(const ProcessSpec& spec, double t, const std::function<double(double)>& jump_mgf,
                    double s, const SeriesConfig& cfg) {
    const double x = spec.scaled_time(checked_time(t));
    if (s == 0.0 || x == 0.0) return 1.0;
    const double g = jump_mgf(s);
    if (!std::isfinite(g)) throw DomainError("jump mgf is not finite at s");
    return kilbas_saigo(spec.params, x * (g - 1.0), cfg);
}

double compound_mean(const ProcessSpec& spec, double t, double jump_mean) {
    return jump_mean * mean(spec, t);
}

}  // namespace fracount
