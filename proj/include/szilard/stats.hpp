#pragma once

#include <cstddef>
#include <vector>

#include "szilard/propagate.hpp"
#include "szilard/protocol.hpp"

/// Thermodynamic functionals of a protocol (work, efficiency, power,
/// fluctuation, slow-driving residual) and sample estimators with error bars.
/// Everything is in reduced units; work is positive when extracted.

namespace szilard {

/// Direct work definition on the stepwise control: W = -sum_k p(t_k) dx_k
/// over every control increment including the jumps on and off rest.  This
/// is the authoritative work value everywhere in this project.
double work_deterministic(const SteppedProtocol& stepped, const PropagationTable& table,
                          double p0);
double work_deterministic(const Protocol& protocol, double p0,
                          std::size_t grid_points = kDefaultSteps,
                          double degeneracy_ratio = 2.0);

/// Extracted work over the erasure cost ln 2.
double efficiency(double work);

/// Work-variance-per-time: Var(W) / gamma_tau for the stepped control.
/// The double sum pairs every control increment with every other through the
/// two-time propagator and adds the same-increment Bernoulli variance, so it
/// is exactly the variance of the sampled stochastic work.
double fluctuation_integral(const SteppedProtocol& stepped, const PropagationTable& table,
                            double p0);
double fluctuation_integral(const Protocol& protocol, double p0,
                            std::size_t grid_points = kDefaultSteps,
                            double degeneracy_ratio = 2.0);

/// Slow-driving residual of (gamma_tau / 2) * fluctuation against the
/// dissipated work ln 2 - W, relative when the denominator allows it.
struct FdrResidual {
    double value = 0.0;
    bool absolute = false;  // guard path: dissipation below 1e-12, value is absolute
};
FdrResidual fdr_residual(double work, double fluctuation, double gamma_tau);

/// Mean with its standard error sqrt(V/N); needs at least two samples.
std::pair<double, double> mean_estimator(const std::vector<double>& samples);

struct VarianceEstimate {
    double variance = 0.0;       // unbiased sample variance
    double std_error = 0.0;      // from the central-moment variance of the estimator
    double std_error_raw = 0.0;  // raw-moment variant, kept for comparison
    bool raw_clamped = false;    // raw-moment variance came out negative
    double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;  // raw sample moments
};

/// Unbiased sample variance with two error-bar variants.  The central-moment
/// form Var(V) = (mu4 - sigma^4 (N-3)/(N-1)) / N is authoritative: the
/// raw-moment expression it is compared against is numerically fragile and
/// overstates the error (see the estimator calibration tests); both are
/// reported so downstream output can document the difference.
VarianceEstimate variance_estimator(const std::vector<double>& samples);

/// Theory-side performance figures for one branch protocol.
struct EnginePerformance {
    double gamma_tau = 0.0;
    int branch = 0;
    double work = 0.0;
    double efficiency = 0.0;
    double power = 0.0;        // work / gamma_tau
    double fluctuation = 0.0;  // Var(W) / gamma_tau
    double fdr = 0.0;
    bool fdr_absolute = false;
};

EnginePerformance performance_theory(const Protocol& protocol,
                                     std::size_t grid_points = kDefaultSteps,
                                     double degeneracy_ratio = 2.0);

}  // namespace szilard
