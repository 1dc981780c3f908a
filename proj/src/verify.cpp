#include "fracount/verify.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "fracount/combinatorics.hpp"
#include "fracount/counting.hpp"
#include "fracount/montecarlo.hpp"
#include "fracount/specialfn.hpp"

namespace fracount {

namespace {

double rel_err(double a, double b) {
    if (a == b) return 0.0;
    return std::fabs(a - b) / std::max(std::fabs(b), 1e-300);
}

std::string describe(const FractalityParams& p) {
    std::ostringstream os;
    os << "mu=" << p.mu() << " beta=" << p.beta();
    return os.str();
}

// Tracks the worst error of a check and the first failing case.
struct Tally {
    double worst = 0.0;
    std::string first_failure;
    long long cases = 0;
    long long skipped = 0;

    void record(double err, double tol, const std::string& where) {
        ++cases;
        if (!(err <= tol) && first_failure.empty()) {
            std::ostringstream os;
            os << where << " err=" << err;
            first_failure = os.str();
        }
        if (std::isnan(err) || err > worst) worst = std::isnan(err) ? INFINITY : err;
    }
    void fail(const std::string& where) {
        ++cases;
        if (first_failure.empty()) first_failure = where;
        worst = INFINITY;
    }
    bool ok() const { return first_failure.empty(); }
    std::string detail() const {
        std::ostringstream os;
        os << cases << " cases, worst " << worst;
        if (skipped) os << ", " << skipped << " not evaluable";
        if (!first_failure.empty()) os << "; first failure: " << first_failure;
        return os.str();
    }
};

template <class F>
CheckResult timed(const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r{name, false, "", 0.0};
    try {
        const Tally t = body();
        r.passed = t.ok();
        r.detail = t.detail();
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<double> times_for(const std::string& grid) {
    return grid == "quick" ? std::vector<double>{1.0} : std::vector<double>{0.5, 1.0, 2.0};
}

// <n^m>, m <= 4, with every Gamma ratio written out.
double explicit_moment(const ProcessSpec& s, double t, int m) {
    const double mu = s.params.mu(), b = s.params.beta();
    const double x = s.rate * std::pow(t, mu + b);
    double k[5] = {1, 0, 0, 0, 0};
    for (int l = 1; l <= 4; ++l)
        k[l] = k[l - 1] * std::tgamma((l - 1) * mu + l * b + 1) / std::tgamma(l * (mu + b) + 1);
    const double x2 = x * x, x3 = x2 * x, x4 = x3 * x;
    switch (m) {
        case 1: return k[1] * x;
        case 2: return 2 * k[2] * x2 + k[1] * x;
        case 3: return 6 * k[3] * x3 + 6 * k[2] * x2 + k[1] * x;
        default: return 24 * k[4] * x4 + 36 * k[3] * x3 + 14 * k[2] * x2 + k[1] * x;
    }
}

Tally check_reductions() {
    Tally t;
    for (int i = 0; i <= 40; ++i) {
        const double z = -10.0 + 15.0 * i / 40;
        t.record(rel_err(kilbas_saigo({1, 0}, z), std::exp(z)), 1e-9, "exp z=" + std::to_string(z));
        for (double mu : {0.5, 0.6, 0.7, 0.8, 0.9})
            t.record(rel_err(kilbas_saigo({mu, 0}, z), mittag_leffler(mu, z)), 1e-9,
                     "E_mu mu=" + std::to_string(mu) + " z=" + std::to_string(z));
        // Closed form of the Mittag-Leffler function at mu = 1/2.
        t.record(rel_err(kilbas_saigo({0.5, 0}, z), std::exp(z * z) * std::erfc(-z)), 1e-9,
                 "erfc z=" + std::to_string(z));
        for (double beta : {-0.25, -0.5, -0.75, -0.9})
            t.record(rel_err(kilbas_saigo({1, beta}, z), std::exp(z / (1 + beta))), 1e-9,
                     "stretched beta=" + std::to_string(beta) + " z=" + std::to_string(z));
    }
    return t;
}

Tally check_normalization(const std::vector<FractalityParams>& grid, const std::vector<double>& times) {
    Tally t;
    for (const auto& p : grid)
        for (double time : times) {
            const auto tab = pmf_table_auto({p, 1.0}, time);
            double total = 0;
            for (double v : tab.probs) total += v;
            t.record(std::fabs(1 - total), 1e-8, describe(p) + " t=" + std::to_string(time));
        }
    return t;
}

Tally check_poisson_moments() {
    Tally t;
    const auto set = moment_set({FractalityParams(1, 0), 1.0}, 4.0);
    t.record(std::fabs(set.raw[0] - 4), 1e-10, "mean");
    t.record(std::fabs(set.variance - 4), 1e-10, "variance");
    t.record(std::fabs(set.skewness - 0.5), 1e-10, "skewness");
    t.record(std::fabs(set.kurtosis_excess - 0.25), 1e-10, "kurtosis");
    return t;
}

Tally check_moment_routes(const std::vector<FractalityParams>& grid, const std::vector<double>& times) {
    Tally t;
    for (const auto& p : grid)
        for (double time : times) {
            const ProcessSpec s{p, 1.0};
            const auto tab = pmf_table_auto(s, time);
            for (int m = 1; m <= 4; ++m) {
                const double v = raw_moment(s, time, m);
                double brute = 0;
                for (std::size_t n = 0; n < tab.probs.size(); ++n) brute += std::pow(double(n), m) * tab.probs[n];
                const std::string where = describe(p) + " t=" + std::to_string(time) + " m=" + std::to_string(m);
                t.record(rel_err(v, explicit_moment(s, time, m)), 1e-10, where + " explicit");
                t.record(rel_err(v, brute), 1e-7, where + " truncated sum");
            }
        }
    return t;
}

Tally check_central_moments(const std::vector<FractalityParams>& grid, const std::vector<double>& times) {
    Tally t;
    for (const auto& p : grid)
        for (double time : times) {
            const ProcessSpec s{p, 1.0};
            const double m1 = raw_moment(s, time, 1), r2 = raw_moment(s, time, 2);
            const double r3 = raw_moment(s, time, 3), r4 = raw_moment(s, time, 4);
            const double c[3] = {r2 - m1 * m1, r3 - 3 * r2 * m1 + 2 * m1 * m1 * m1,
                                 r4 - 4 * r3 * m1 + 6 * r2 * m1 * m1 - 3 * m1 * m1 * m1 * m1};
            for (int m = 2; m <= 4; ++m)
                t.record(rel_err(central_moment(s, time, m), c[m - 2]), 1e-10,
                         describe(p) + " t=" + std::to_string(time) + " m=" + std::to_string(m));
        }
    return t;
}

Tally check_interarrival(const std::vector<FractalityParams>& grid) {
    Tally t;
    for (const auto& p : grid) {
        const ProcessSpec s{p, 1.0};
        const double rho = p.rho();
        // Integrate psi(tau) dtau in v = tau^rho up to lambda V = 5 (or the largest
        // evaluable point): the density is evaluated directly, the Jacobian
        // removes its endpoint singularity.
        double v_end = 5.0;
        while (v_end > 1e-3) {
            try {
                survival_zero(s, std::pow(v_end, 1 / rho));
                break;
            } catch (const NumericError&) {
                v_end *= 0.8;
            }
        }
        const double tau_end = std::pow(v_end, 1 / rho);
        auto integrand = [&](double v) {
            if (v <= 0) return rho == 1.0 ? interarrival_pdf(s, 1e-300) : 0.0;
            const double tau = std::pow(v, 1 / rho);
            return interarrival_pdf(s, tau) * tau / (rho * v);
        };
        double err = 0;
        const double integral =
            boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, v_end, 15, 1e-12, &err);
        t.record(std::fabs(integral + survival_zero(s, tau_end) - 1), 1e-6, describe(p) + " integral");

        for (double tau : {0.2, 0.7, 1.5, 3.0}) {
            const double h = 1e-6 * tau;
            const double fd = -(survival_zero(s, tau + h) - survival_zero(s, tau - h)) / (2 * h);
            t.record(rel_err(fd, interarrival_pdf(s, tau)), 1e-5, describe(p) + " derivative tau=" + std::to_string(tau));
        }
    }
    for (double mu : {0.5, 0.7, 0.9, 1.0})
        for (double lambda : {1.0, 2.0}) {
            const ProcessSpec s{FractalityParams(mu, 0), lambda};
            const std::string where = " mu=" + std::to_string(mu) + " lambda=" + std::to_string(lambda);
            // Small u needs the density out past the default |z| <= 40 guard.
            SeriesConfig wide;
            wide.z_abs_max = 200;
            for (double u : {0.5, 1.0, 2.0, 5.0, 20.0, 50.0}) {
                const double exact = lambda / (lambda + std::pow(u, mu));
                t.record(rel_err(interarrival_laplace_quadrature(s, u, wide), exact), 1e-8,
                         "laplace quadrature" + where + " u=" + std::to_string(u));
                if (u >= 20)
                    t.record(rel_err(interarrival_laplace_series(s, u).value, exact), 1e-8,
                             "laplace series" + where + " u=" + std::to_string(u));
            }
        }
    return t;
}

Tally check_identities(const std::vector<FractalityParams>& grid) {
    Tally t;
    for (const auto& p : grid) {
        for (int m = 0; m <= 12; ++m) {
            const auto [a, b] = ks_identity_sides(p, m);
            const auto [c, d] = ks_identity_sides_comb(p, m);
            t.record(rel_err(a, b), 1e-9, describe(p) + " Bell m=" + std::to_string(m));
            t.record(rel_err(c, d), 1e-9, describe(p) + " comb m=" + std::to_string(m));
        }
        for (double z : {-1.0, -0.5, 0.5, 1.0})
            t.record(rel_err(ks_via_stirling(p, z, 150), kilbas_saigo(p, z)), 1e-8,
                     describe(p) + " series z=" + std::to_string(z));
    }
    return t;
}

Tally check_count_sampling(const std::vector<FractalityParams>& grid, const VerifyOptions& o) {
    Tally t;
    std::uint64_t index = 0;
    for (const auto& p : grid) {
        const ProcessSpec s{p, 1.0};
        const CountSampler sampler(s, 1.0);
        const auto sum = run_batches(RngSpec{o.seed}.child(index++), o.samples,
                                     [&](Rng& r) { return double(sampler(r)); }, 100000, o.threads);
        t.record(std::fabs(sum.mean - mean(s, 1.0)) / sum.se_mean, 4.0, describe(p) + " mean (z-score)");
        t.record(std::fabs(sum.variance - variance(s, 1.0)) / sum.se_variance, 4.0,
                 describe(p) + " variance (z-score)");
    }
    return t;
}

std::vector<ProcessSpec> ks_specs(const std::string& grid) {
    std::vector<ProcessSpec> out{{FractalityParams(1, 0), 2.0}, {FractalityParams(1, -0.5), 1.0},
                                 {FractalityParams(0.7, 0.1), 1.0}};
    if (grid != "quick") out.push_back({FractalityParams(0.5, 0), 1.0});
    return out;
}

Tally check_first_arrival(const VerifyOptions& o) {
    Tally t;
    std::uint64_t index = 100;
    for (const auto& s : ks_specs(o.grid)) {
        // Censor where lambda tau^rho = 8; the KS distance is taken over the
        // uncensored range plus the censored mass.
        const FirstArrivalSampler sampler(s, {}, std::pow(8.0 / s.rate, 1 / s.params.rho()));
        Rng rng(RngSpec{o.seed}.child(index++));
        std::vector<double> draws;
        long long censored = 0;
        for (long long i = 0; i < o.ks_draws; ++i) {
            const auto tau = sampler(rng);
            if (tau)
                draws.push_back(*tau);
            else
                ++censored;
        }
        std::sort(draws.begin(), draws.end());
        const double n = double(o.ks_draws);
        double d = std::fabs(censored / n - sampler.survival_at_horizon());
        for (std::size_t i = 0; i < draws.size(); ++i) {
            const double cdf = 1 - survival_zero(s, draws[i]);
            d = std::max({d, std::fabs(cdf - i / n), std::fabs(cdf - (i + 1) / n)});
        }
        // Asymptotic Kolmogorov critical value at p = 0.001.
        t.record(d * std::sqrt(n), 1.9495, describe(s.params) + " rate=" + std::to_string(s.rate) + " sqrt(n) D");
    }
    return t;
}

Tally check_compound(const VerifyOptions& o) {
    Tally t;
    std::uint64_t index = 200;
    const std::vector<ProcessSpec> specs{{FractalityParams(1, 0), 1.0}, {FractalityParams(0.7, 0.1), 1.0},
                                         {FractalityParams(0.5, 0), 1.0}};
    for (const auto& s : specs)
        for (const auto& jump : {JumpDistribution::degenerate(3), JumpDistribution::exponential(1)}) {
            const CompoundSampler sampler(s, 2.0, jump);
            const auto sum = run_batches(RngSpec{o.seed}.child(index++), o.samples,
                                         [&](Rng& r) { return sampler(r); }, 100000, o.threads);
            t.record(std::fabs(sum.mean - compound_mean(s, 2.0, jump.mean)) / sum.se_mean, 3.0,
                     describe(s.params) + " " + jump.name + " (z-score)");
        }
    return t;
}

Tally check_signs(const std::vector<FractalityParams>& grid) {
    Tally t;
    for (const auto& p : grid)
        for (int i = 1; i <= 40; ++i) {
            const double x = 0.25 * i;
            for (int n = 0; n <= 6; ++n) {
                double v;
                try {
                    v = kilbas_saigo_deriv(p, n, -x);
                } catch (const NumericError&) {
                    ++t.skipped;
                    continue;
                }
                // d^n/dx^n E(-x) = (-1)^n E^(n)(-x) alternates, i.e. E^(n)(-x) >= 0.
                t.record(std::max(0.0, -v), 1e-10,
                         describe(p) + " x=" + std::to_string(x) + " n=" + std::to_string(n));
            }
        }
    return t;
}

}  // namespace

bool VerifyReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<FractalityParams> verify_grid(const std::string& name) {
    std::vector<double> mus;
    if (name == "default")
        mus = {0.3, 0.5, 0.7, 1.0};
    else if (name == "quick")
        mus = {0.5, 1.0};
    else
        throw InvalidParameter("grid must be 'default' or 'quick'");
    std::vector<FractalityParams> out;
    for (double mu : mus)
        for (double beta : {-0.9 * mu, 0.0, (1 - mu) / 2, 1 - mu}) {
            const FractalityParams p(mu, beta);
            if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
        }
    return out;
}

VerifyReport verify(const VerifyOptions& o) {
    if (o.samples < 2 || o.ks_draws < 2) throw InvalidParameter("sample counts must be >= 2");
    const auto grid = verify_grid(o.grid);
    const auto times = times_for(o.grid);
    VerifyReport report;
    auto add = [&](const std::string& name, auto&& body) { report.checks.push_back(timed(name, body)); };
    add("special-case reductions", [&] { return check_reductions(); });
    add("normalization", [&] { return check_normalization(grid, times); });
    add("poisson moments", [&] { return check_poisson_moments(); });
    add("raw moment routes", [&] { return check_moment_routes(grid, times); });
    add("central moments", [&] { return check_central_moments(grid, times); });
    add("interarrival density", [&] { return check_interarrival(grid); });
    add("stirling identities", [&] { return check_identities(grid); });
    add("count sampling", [&] { return check_count_sampling(grid, o); });
    add("first-arrival sampling", [&] { return check_first_arrival(o); });
    add("compound mean", [&] { return check_compound(o); });
    add("derivative signs", [&] { return check_signs(grid); });
    return report;
}

}  // namespace fracount
