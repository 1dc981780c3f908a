#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "fracount/params.hpp"
#include "fracount/rng.hpp"

namespace fracount {

/// Counting probabilities P(n,t) for n = 0..n_max with the unlisted mass.
struct PMFTable {
    ProcessSpec spec;
    double t;
    std::vector<double> probs;
    /// 1 - sum(probs).
    double tail_mass;
};

/// Raw and central moments of orders 1..4 (index 0 is order 1).
struct MomentSet {
    std::array<double, 4> raw;
    std::array<double, 4> central;
    double variance;
    double skewness;
    double kurtosis_excess;
};

/// P(n,t) = x^n sum_m C(m+n,n) K_{m+n} (-x)^m with x = lambda t^rho.
///
/// Roundoff negatives down to -1e-10 clamp to 0 and excesses up to 1e-10
/// above 1 clamp to 1; anything further out is a PrecisionLossError.
double pmf(const ProcessSpec& spec, double t, int n, const SeriesConfig& cfg = {});

/// PrecisionLossError if the tail mass is below -1e-8.
PMFTable pmf_table(const ProcessSpec& spec, double t, int n_max, const SeriesConfig& cfg = {});

/// Grows n until pmf(n) < 1e-12 * max so far for five consecutive n, or n = cap.
PMFTable pmf_table_auto(const ProcessSpec& spec, double t, const SeriesConfig& cfg = {},
                        int cap = 500);

/// Probability of no arrival by t, P(0,t).
double survival_zero(const ProcessSpec& spec, double t, const SeriesConfig& cfg = {});

/// sum_n s^n P(n,t) for s in [0,1].
double pgf(const ProcessSpec& spec, double t, double s, const SeriesConfig& cfg = {});

/// sum_n e^{-s n} P(n,t).
double mgf(const ProcessSpec& spec, double t, double s, const SeriesConfig& cfg = {});

double mean(const ProcessSpec& spec, double t);

/// <n^m> = sum_l S_{mu,beta}(m,l) x^l, 1 <= m <= 8.
double raw_moment(const ProcessSpec& spec, double t, int m);

/// Central moments 1..4 as polynomials in the mean, evaluated in binary128.
double central_moment(const ProcessSpec& spec, double t, int m);

double variance(const ProcessSpec& spec, double t);

/// DegenerateDistributionError when the variance is zero (t = 0).
double skewness(const ProcessSpec& spec, double t);
double kurtosis_excess(const ProcessSpec& spec, double t);

MomentSet moment_set(const ProcessSpec& spec, double t);

/// Interarrival density psi(tau) = rho lambda tau^{rho-1} E'(-lambda tau^rho).
double interarrival_pdf(const ProcessSpec& spec, double tau, const SeriesConfig& cfg = {});

struct LaplaceSeriesResult {
    double value;
    /// Magnitude of the first omitted term.
    double error_estimate;
    int terms;
};

/// Laplace transform of psi as a series in u^{-rho}:
///   rho sum_l (-1)^l (l+1) lambda^{l+1} Gamma(rho(l+1)) K_{l+1} u^{-rho(l+1)}.
///
/// Treated as asymptotic: summation stops at max_terms, at a negligible term,
/// or when term magnitudes stop decreasing, in which case the midpoint of the
/// last two partial sums is returned. AsymptoticSeriesError if the second
/// term is already larger than the first.
LaplaceSeriesResult interarrival_laplace_series(const ProcessSpec& spec, double u,
                                                int max_terms = 500);

/// int_0^inf e^{-u tau} psi(tau) d tau by adaptive Gauss-Kronrod in v = tau^rho,
/// where the density loses its endpoint singularity.
double interarrival_laplace_quadrature(const ProcessSpec& spec, double u,
                                       const SeriesConfig& cfg = {});

/// mu = 1 only: r(t) = sigma lambda t^{sigma-1} and Lambda(t) = lambda t^sigma,
/// with the rate field read as the lambda_sigma of the non-homogeneous Poisson
/// process. The counting law at mu = 1 is Poisson with mean (lambda/sigma) t^sigma,
/// i.e. Lambda(t)/sigma for the same rate field.
double rate_function(const ProcessSpec& spec, double t);
double cumulative_rate(const ProcessSpec& spec, double t);

/// Jump law of the compound process: moment generating function E[e^{sY}],
/// sampler and mean.
struct JumpDistribution {
    std::string name;
    std::function<double(double)> mgf;
    std::function<double(Rng&)> sample;
    double mean;

    static JumpDistribution degenerate(double value);
    static JumpDistribution exponential(double rate);
    static JumpDistribution normal(double mean, double stddev);
};

/// E(lambda t^rho (g(s) - 1)) with g the jump moment generating function.
double compound_mgf(const ProcessSpec& spec, double t, const std::function<double(double)>& jump_mgf,
                    double s, const SeriesConfig& cfg = {});

double compound_mean(const ProcessSpec& spec, double t, double jump_mean);

}  // namespace fracount
