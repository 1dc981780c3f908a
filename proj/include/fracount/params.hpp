#pragma once

#include <string>

#include "fracount/errors.hpp"

namespace fracount {

/// Fractality exponents (mu, beta) of the counting process.
///
/// mu is the order of the Caputo time derivative (memory), beta the exponent
/// of the power-law rate factor t^beta. Admissible values satisfy
/// 0 < mu <= 1 and -mu < beta <= 1 - mu, so that rho = mu + beta lies in (0, 1].
class FractalityParams {
public:
    /// Validates and throws InvalidParameter naming the violated constraint.
    FractalityParams(double mu, double beta);

    double mu() const noexcept { return mu_; }
    double beta() const noexcept { return beta_; }

    /// Exponent of time in the scaled argument lambda * t^rho.
    double rho() const noexcept { return mu_ + beta_; }

    /// sigma = 1 + beta, the Weibull shape when mu = 1.
    double sigma() const noexcept { return 1.0 + beta_; }

    bool operator==(const FractalityParams&) const = default;

    /// Empty string when (mu, beta) is admissible, otherwise the message.
    static std::string violation(double mu, double beta);

private:
    double mu_;
    double beta_;
};

/// Truncation and safety knobs shared by every series evaluation.
struct SeriesConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-300;
    int max_terms = 2000;
    double z_abs_max = 40.0;

    /// Throws InvalidParameter if a knob is out of range.
    void validate() const;
};

/// Fractality exponents plus the arrival rate lambda_{mu+beta}
/// (units time^-(mu+beta)).
struct ProcessSpec {
    ProcessSpec(FractalityParams p, double r);
    ProcessSpec(double mu, double beta, double r) : ProcessSpec(FractalityParams(mu, beta), r) {}

    FractalityParams params;
    double rate;

    /// lambda * t^rho, the argument scale of every closed form.
    double scaled_time(double t) const;
};

}  // namespace fracount
