#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fracount/counting.hpp"
#include "fracount/rng.hpp"

namespace fracount {

struct SampleSummary {
    long long n_samples = 0;
    double mean = 0.0;
    /// Unbiased (n - 1) sample variance.
    double variance = 0.0;
    /// NaN when the variance is zero.
    double skewness = 0.0;
    double kurtosis_excess = 0.0;
    double se_mean = 0.0;
    double se_variance = 0.0;
};

/// One-pass central-moment accumulator (Pebay's update); mergeable, so
/// batches can be combined in a fixed order.
class MomentAccumulator {
public:
    void add(double x);
    void merge(const MomentAccumulator& other);

    long long count() const noexcept { return n_; }

    /// InsufficientDataError with fewer than two samples.
    SampleSummary summary() const;

private:
    long long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double m4_ = 0.0;
};

SampleSummary summarize(const std::vector<double>& samples);

/// Inverse-CDF draws from an automatically sized PMF table; the tail mass
/// (below 1e-9) is assigned to n_max + 1.
class CountSampler {
public:
    CountSampler(const ProcessSpec& spec, double t, const SeriesConfig& cfg = {});

    int operator()(Rng& rng) const;

    const PMFTable& table() const noexcept { return table_; }

private:
    PMFTable table_;
    std::vector<double> cdf_;
};

int sample_count(const ProcessSpec& spec, double t, Rng& rng, const SeriesConfig& cfg = {});

/// First-arrival times by inverting survival_zero(tau) = u.
///
/// The bracket starts at tau = 1 and doubles (or halves) until it encloses
/// the root; a bracketed TOMS 748 solve then brings it to relative width
/// 1e-10 in tau. Survival is only evaluable up to a horizon (at most
/// max_horizon, earlier where the series loses precision); a draw with
/// u < survival(horizon) is censored.
class FirstArrivalSampler {
public:
    FirstArrivalSampler(const ProcessSpec& spec, const SeriesConfig& cfg = {},
                        double max_horizon = 1e9);

    /// nullopt for a censored draw.
    std::optional<double> operator()(Rng& rng) const;

    /// Survival-inversion for a given u; nullopt if the root lies past the horizon.
    std::optional<double> invert(double u) const;

    double horizon() const noexcept { return horizon_; }
    double survival_at_horizon() const noexcept { return survival_horizon_; }

private:
    ProcessSpec spec_;
    SeriesConfig cfg_;
    double horizon_;
    double survival_horizon_;
};

/// RangeError when the draw falls beyond the evaluable horizon.
double sample_first_arrival(const ProcessSpec& spec, Rng& rng, const SeriesConfig& cfg = {});

/// Event times in (0, horizon].
///
/// mu = 1: non-homogeneous Poisson process with cumulative intensity
/// (lambda/sigma) t^sigma, by time change of unit-rate arrivals.
/// mu < 1, beta = 0: renewal process with Mittag-Leffler interarrivals.
/// Other parameters: UnsupportedError.
std::vector<double> simulate_path_classical(const ProcessSpec& spec, double horizon, Rng& rng,
                                            const SeriesConfig& cfg = {});

class CompoundSampler {
public:
    CompoundSampler(const ProcessSpec& spec, double t, JumpDistribution jump,
                    const SeriesConfig& cfg = {});

    double operator()(Rng& rng) const;

private:
    CountSampler counts_;
    JumpDistribution jump_;
};

double sample_compound(const ProcessSpec& spec, double t, const JumpDistribution& jump, Rng& rng,
                       const SeriesConfig& cfg = {});

/// Draws n_samples values in batches of batch_size; batch b uses
/// rng.child(b) and results are merged in batch order, so the summary does
/// not depend on `threads`.
SampleSummary run_batches(const RngSpec& rng, long long n_samples,
                          const std::function<double(Rng&)>& draw, long long batch_size = 100000,
                          int threads = 1);

}  // namespace fracount
