#include "fracount/montecarlo.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace fracount {

// ---- rng -------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RngSpec RngSpec::child(std::uint64_t index) const {
    std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (index + 1));
    return {splitmix64(state), algorithm};
}

Rng::Rng(const RngSpec& spec) : spec_(spec), splitmix_(false), mt_(spec.seed), state_(spec.seed) {
    if (spec.algorithm == "splitmix64")
        splitmix_ = true;
    else if (spec.algorithm != "mt19937_64")
        throw InvalidParameter("unknown rng algorithm '" + spec.algorithm +
                               "' (expected mt19937_64 or splitmix64)");
}

Rng::result_type Rng::operator()() { return splitmix_ ? splitmix64(state_) : mt_(); }

double Rng::uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

// ---- moments ---------------------------------------------------------------

void MomentAccumulator::add(double x) {
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double dn = delta / n;
    const double dn2 = dn * dn;
    const double term1 = delta * dn * n1;
    mean_ += dn;
    m4_ += term1 * dn2 * (n * n - 3 * n + 3) + 6 * dn2 * m2_ - 4 * dn * m3_;
    m3_ += term1 * dn * (n - 2) - 3 * dn * m2_;
    m2_ += term1;
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double d = o.mean_ - mean_;
    const double d2 = d * d;

    const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
    const double m3 = m3_ + o.m3_ + d2 * d * na * nb * (na - nb) / (n * n) +
                      3 * d * (na * o.m2_ - nb * m2_) / n;
    const double m4 = m4_ + o.m4_ + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                      6 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) +
                      4 * d * (na * o.m3_ - nb * m3_) / n;
    mean_ += d * nb / n;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
    n_ += o.n_;
}

SampleSummary MomentAccumulator::summary() const {
    if (n_ < 2) throw InsufficientDataError("summary needs at least two samples");
    const double n = static_cast<double>(n_);
    SampleSummary s;
    s.n_samples = n_;
    s.mean = mean_;
    s.variance = std::max(m2_, 0.0) / (n - 1);
    if (m2_ > 0.0) {
        s.skewness = std::sqrt(n) * m3_ / std::pow(m2_, 1.5);
        s.kurtosis_excess = n * m4_ / (m2_ * m2_) - 3.0;
    } else {
        s.skewness = std::nan("");
        s.kurtosis_excess = std::nan("");
    }
    s.se_mean = std::sqrt(s.variance / n);
    const double fourth = m4_ / n;
    const double v = (fourth - s.variance * s.variance * (n - 3) / (n - 1)) / n;
    s.se_variance = std::sqrt(std::max(v, 0.0));
    return s;
}

SampleSummary summarize(const std::vector<double>& samples) {
    MomentAccumulator acc;
    for (double x : samples) acc.add(x);
    return acc.summary();
}

// ---- counts ----------------------------------------------------------------

CountSampler::CountSampler(const ProcessSpec& spec, double t, const SeriesConfig& cfg)
    : table_(pmf_table_auto(spec, t, cfg)) {
    if (table_.tail_mass > 1e-9) {
        std::ostringstream os;
        os << "count sampler: tail mass " << table_.tail_mass << " beyond n = "
           << table_.probs.size() - 1 << " exceeds 1e-9";
        throw RangeError(os.str());
    }
    cdf_.reserve(table_.probs.size());
    double run = 0.0;
    for (double p : table_.probs) cdf_.push_back(run += p);
}

int CountSampler::operator()(Rng& rng) const {
    const double u = rng.uniform();
    return static_cast<int>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
}

int sample_count(const ProcessSpec& spec, double t, Rng& rng, const SeriesConfig& cfg) {
    return CountSampler(spec, t, cfg)(rng);
}

// ---- first arrival ---------------------------------------------------------

namespace {

constexpr double kMaxHorizon = 1e9;

bool survival_evaluable(const ProcessSpec& spec, double tau, const SeriesConfig& cfg) {
    try {
        survival_zero(spec, tau, cfg);
        return true;
    } catch (const NumericError&) {
        return false;
    }
}

// Root of survival(tau) = u in [lo, hi] with survival(lo) > u >= survival(hi).
double solve_survival(const ProcessSpec& spec, const SeriesConfig& cfg, double u, double lo,
                      double hi, double s_lo, double s_hi) {
    auto f = [&](double tau) { return survival_zero(spec, tau, cfg) - u; };
    auto tol = [](double a, double b) { return std::fabs(b - a) <= 1e-10 * std::min(std::fabs(a), std::fabs(b)); };
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(f, lo, hi, s_lo - u, s_hi - u, tol, iters);
    return 0.5 * (root.first + root.second);
}

}  // namespace

FirstArrivalSampler::FirstArrivalSampler(const ProcessSpec& spec, const SeriesConfig& cfg,
                                         double max_horizon)
    : spec_(spec), cfg_(cfg) {
    if (!(max_horizon > 0.0)) throw InvalidParameter("max_horizon must be > 0");
    const double limit = std::min(max_horizon, kMaxHorizon);
    double tau = std::min(1.0, limit);
    if (survival_evaluable(spec, tau, cfg)) {
        while (tau * 2 <= limit && survival_evaluable(spec, tau * 2, cfg)) tau *= 2;
        // Refine between tau and 2 tau in log space.
        double good = tau, bad = std::min(2 * tau, limit);
        if (bad > good && survival_evaluable(spec, bad, cfg)) good = bad;
        for (int i = 0; i < 30 && bad / good > 1 + 1e-6; ++i) {
            const double mid = std::sqrt(good * bad);
            (survival_evaluable(spec, mid, cfg) ? good : bad) = mid;
        }
        tau = good;
    } else {
        while (!survival_evaluable(spec, tau, cfg)) {
            tau /= 2;
            if (tau < 1e-300) throw RangeError("first-arrival sampler: survival not evaluable");
        }
    }
    horizon_ = tau;
    survival_horizon_ = survival_zero(spec, horizon_, cfg);
}

std::optional<double> FirstArrivalSampler::invert(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw InvalidParameter("u must lie in (0, 1)");
    if (u < survival_horizon_) return std::nullopt;

    double hi = std::min(1.0, horizon_);
    double s_hi = survival_zero(spec_, hi, cfg_);
    double lo = hi, s_lo = s_hi;
    if (s_hi > u) {
        // Terminates: survival(horizon) <= u.
        while (s_hi > u) {
            lo = hi;
            s_lo = s_hi;
            hi = std::min(hi * 2, horizon_);
            s_hi = survival_zero(spec_, hi, cfg_);
        }
    } else {
        while (s_lo <= u) {
            hi = lo;
            s_hi = s_lo;
            lo /= 2;
            s_lo = survival_zero(spec_, lo, cfg_);
        }
    }
    if (s_hi == u) return hi;
    return solve_survival(spec_, cfg_, u, lo, hi, s_lo, s_hi);
}

std::optional<double> FirstArrivalSampler::operator()(Rng& rng) const { return invert(rng.uniform()); }

double sample_first_arrival(const ProcessSpec& spec, Rng& rng, const SeriesConfig& cfg) {
    const FirstArrivalSampler sampler(spec, cfg);
    const auto tau = sampler(rng);
    if (!tau) {
        std::ostringstream os;
        os << "first arrival lies beyond the bracketing horizon tau = " << sampler.horizon();
        throw RangeError(os.str());
    }
    return *tau;
}

// ---- paths -----------------------------------------------------------------

std::vector<double> simulate_path_classical(const ProcessSpec& spec, double horizon, Rng& rng,
                                            const SeriesConfig& cfg) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw InvalidParameter("horizon must be >= 0");
    const auto& p = spec.params;
    std::vector<double> events;

    if (p.mu() == 1.0) {
        const double sigma = p.sigma();
        const double scale = sigma / spec.rate;
        double gamma = 0.0;
        for (;;) {
            gamma += -std::log(rng.uniform());
            const double t = std::pow(scale * gamma, 1.0 / sigma);
            if (t > horizon) break;
            events.push_back(t);
        }
        return events;
    }
    if (p.beta() != 0.0)
        throw UnsupportedError(
            "path simulation is available only for mu = 1 or beta = 0; use fixed-time count sampling");

    double now = 0.0;
    for (;;) {
        const double remaining = horizon - now;
        if (remaining <= 0.0) break;
        const double u = rng.uniform();
        const double s_end = survival_zero(spec, remaining, cfg);
        if (u < s_end) break;
        const double gap = solve_survival(spec, cfg, u, 0.0, remaining, 1.0, s_end);
        now += gap;
        if (now > horizon) break;
        events.push_back(now);
    }
    return events;
}

// ---- compound --------------------------------------------------------------

CompoundSampler::CompoundSampler(const ProcessSpec& spec, double t, JumpDistribution jump,
                                 const SeriesConfig& cfg)
    : counts_(spec, t, cfg), jump_(std::move(jump)) {}

double CompoundSampler::operator()(Rng& rng) const {
    const int n = counts_(rng);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += jump_.sample(rng);
    return sum;
}

double sample_compound(const ProcessSpec& spec, double t, const JumpDistribution& jump, Rng& rng,
                       const SeriesConfig& cfg) {
    return CompoundSampler(spec, t, jump, cfg)(rng);
}

// ---- batches ---------------------------------------------------------------

SampleSummary run_batches(const RngSpec& rng, long long n_samples,
                          const std::function<double(Rng&)>& draw, long long batch_size, int threads) {
    if (n_samples < 2) throw InsufficientDataError("need at least two samples");
    if (batch_size < 1) throw InvalidParameter("batch_size must be >= 1");
    threads = std::max(threads, 1);

    const long long batches = (n_samples + batch_size - 1) / batch_size;
    auto run_one = [&](long long b) {
        Rng r(rng.child(static_cast<std::uint64_t>(b)));
        MomentAccumulator acc;
        const long long count = std::min(batch_size, n_samples - b * batch_size);
        for (long long i = 0; i < count; ++i) acc.add(draw(r));
        return acc;
    };

    std::vector<MomentAccumulator> parts(batches);
    for (long long start = 0; start < batches; start += threads) {
        std::vector<std::future<MomentAccumulator>> pending;
        const long long stop = std::min(batches, start + threads);
        for (long long b = start + 1; b < stop; ++b)
            pending.push_back(std::async(std::launch::async, run_one, b));
        parts[start] = run_one(start);
        for (long long b = start + 1; b < stop; ++b) parts[b] = pending[b - start - 1].get();
    }
    MomentAccumulator total;
    for (const auto& part : parts) total.merge(part);
    return total.summary();
}

}  // namespace fracount
