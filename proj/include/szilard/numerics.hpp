#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

/// Thin wrappers around the GSL adaptive quadrature, bracketing root solver
/// and minimizers.  Every call allocates its own workspace, so all functions
/// here are safe to use from concurrent threads.  Callables must not throw:
/// they are invoked from C frames.

namespace szilard {

/// Raised when an iterative routine cannot reach its tolerance or is handed
/// an invalid bracket.  The message carries the achieved-error diagnostics.
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

using ScalarFn = std::function<double(double)>;

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;  // error estimate reported by the routine
    bool converged = true;
};

/// Adaptive quadrature of f over [a, b] (QAGS; handles integrable endpoint
/// singularities).  Returns the achieved error estimate instead of throwing
/// when the requested tolerance is missed; callers decide how strict to be.
QuadratureResult integrate(const ScalarFn& f, double a, double b,
                           double abs_tol = 1e-10, double rel_tol = 1e-10);

/// Brent root bracketing on [lo, hi]; requires a sign change.
double find_root(const ScalarFn& f, double lo, double hi,
                 double abs_tol = 1e-14, double rel_tol = 1e-12,
                 int max_iter = 200);

struct ScalarMinResult {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
    bool converged = true;
};

/// Brent minimization given a bracket lo < mid < hi with f(mid) below both
/// endpoint values.  A smooth minimum cannot be localized below the
/// sqrt(machine epsilon) floor, so rel_tol should stay above ~1e-7.
ScalarMinResult minimize_scalar(const ScalarFn& f, double lo, double mid, double hi,
                                double abs_tol = 0.0, double rel_tol = 1e-6,
                                int max_iter = 200);

struct MultiMinResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = true;
};

using VectorFn = std::function<double(const std::vector<double>&)>;
using GradientFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

/// BFGS descent with analytic gradient.  Stops on |grad| < grad_tol or when
/// line searches stall; the best point found is returned either way.
MultiMinResult minimize_bfgs(const VectorFn& f, const GradientFn& grad,
                             const std::vector<double>& x0,
                             double step = 0.1, double grad_tol = 1e-9,
                             int max_iter = 2000);

/// Derivative-free Nelder-Mead fallback for non-smooth objectives.
MultiMinResult minimize_simplex(const VectorFn& f, const std::vector<double>& x0,
                                double step = 0.5, double size_tol = 1e-10,
                                int max_iter = 20000);

/// SplitMix64 finalizer; used to derive independent RNG substreams from
/// (master seed, stream index) pairs.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace szilard
