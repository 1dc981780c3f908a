#include "fracount/params.hpp"

#include <cmath>
#include <sstream>

namespace fracount {

namespace {
// beta = 1 - mu typed as a decimal literal may land one ulp above 1 - mu.
constexpr double kBoundSlack = 1e-12;
}  // namespace

std::string FractalityParams::violation(double mu, double beta) {
    if (!std::isfinite(mu) || !std::isfinite(beta)) return "mu and beta must be finite";
    if (!(mu > 0.0 && mu <= 1.0)) return "mu must satisfy 0 < mu <= 1";
    if (!(beta > -mu && beta <= 1.0 - mu + kBoundSlack))
        return "beta must satisfy -mu < beta <= 1-mu";
    return {};
}

FractalityParams::FractalityParams(double mu, double beta) : mu_(mu), beta_(beta) {
    if (auto msg = violation(mu, beta); !msg.empty()) {
        std::ostringstream os;
        os << msg << " (got mu=" << mu << ", beta=" << beta << ")";
        throw InvalidParameter(os.str());
    }
}

void SeriesConfig::validate() const {
    if (!(rel_tol > 0.0)) throw InvalidParameter("rel_tol must be > 0");
    if (!(abs_tol >= 0.0)) throw InvalidParameter("abs_tol must be >= 0");
    if (max_terms < 8) throw InvalidParameter("max_terms must be >= 8");
    if (!(z_abs_max > 0.0)) throw InvalidParameter("z_abs_max must be > 0");
}

ProcessSpec::ProcessSpec(FractalityParams p, double r) : params(p), rate(r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidParameter("rate must be > 0");
}

double ProcessSpec::scaled_time(double t) const {
    if (!(t >= 0.0)) throw InvalidParameter("time must be >= 0");
    if (t == 0.0) return 0.0;
    return rate * std::pow(t, params.rho());
}

}  // namespace fracount
