#include "szilard/numerics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_roots.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>

namespace szilard {
namespace {

// GSL aborts on error by default; status codes are handled at each call site.
void disable_gsl_abort() {
    static std::once_flag flag;
    std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

double trampoline(double x, void* params) {
    return (*static_cast<const ScalarFn*>(params))(x);
}

struct WorkspaceDeleter {
    void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

}  // namespace

QuadratureResult integrate(const ScalarFn& f, double a, double b,
                           double abs_tol, double rel_tol) {
    disable_gsl_abort();
    if (!(a <= b)) throw NumericsError("integrate: interval endpoints out of order");
    if (a == b) return {0.0, 0.0, true};

    constexpr std::size_t kLimit = 5000;
    std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
        gsl_integration_workspace_alloc(kLimit));
    if (!ws) throw NumericsError("integrate: workspace allocation failed");

    gsl_function gf;
    gf.function = &trampoline;
    gf.params = const_cast<ScalarFn*>(&f);

    QuadratureResult out;
    int status = gsl_integration_qags(&gf, a, b, abs_tol, rel_tol, kLimit,
                                      ws.get(), &out.value, &out.abs_error);
    out.converged = (status == GSL_SUCCESS);
    if (status != GSL_SUCCESS && status != GSL_EROUND && status != GSL_EMAXITER &&
        status != GSL_EDIVERGE && status != GSL_ESING) {
        std::ostringstream msg;
        msg << "integrate: " << gsl_strerror(status);
        throw NumericsError(msg.str());
    }
    return out;
}

double find_root(const ScalarFn& f, double lo, double hi,
                 double abs_tol, double rel_tol, int max_iter) {
    disable_gsl_abort();
    if (!(lo < hi)) throw NumericsError("find_root: empty bracket");
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        std::ostringstream msg;
        msg << "find_root: no sign change on [" << lo << ", " << hi << "] (f: " << flo
            << ", " << fhi << ")";
        throw NumericsError(msg.str());
    }

    gsl_function gf;
    gf.function = &trampoline;
    gf.params = const_cast<ScalarFn*>(&f);

    gsl_root_fsolver* solver = gsl_root_fsolver_alloc(gsl_root_fsolver_brent);
    if (!solver) throw NumericsError("find_root: solver allocation failed");
    gsl_root_fsolver_set(solver, &gf, lo, hi);

    double root = 0.5 * (lo + hi);
    int status = GSL_CONTINUE;
    for (int i = 0; i < max_iter && status == GSL_CONTINUE; ++i) {
        status = gsl_root_fsolver_iterate(solver);
        if (status != GSL_SUCCESS) break;
        root = gsl_root_fsolver_root(solver);
        const double a = gsl_root_fsolver_x_lower(solver);
        const double b = gsl_root_fsolver_x_upper(solver);
        status = gsl_root_test_interval(a, b, abs_tol, rel_tol);
    }
    gsl_root_fsolver_free(solver);
    if (status != GSL_SUCCESS) {
        throw NumericsError("find_root: did not converge within iteration budget");
    }
    return root;
}

ScalarMinResult minimize_scalar(const ScalarFn& f, double lo, double mid, double hi,
                                double abs_tol, double rel_tol, int max_iter) {
    disable_gsl_abort();
    if (!(lo < mid && mid < hi)) throw NumericsError("minimize_scalar: bad bracket order");

    gsl_function gf;
    gf.function = &trampoline;
    gf.params = const_cast<ScalarFn*>(&f);

    gsl_min_fminimizer* m = gsl_min_fminimizer_alloc(gsl_min_fminimizer_brent);
    if (!m) throw NumericsError("minimize_scalar: minimizer allocation failed");
    int status = gsl_min_fminimizer_set(m, &gf, mid, lo, hi);
    if (status != GSL_SUCCESS) {
        gsl_min_fminimizer_free(m);
        throw NumericsError("minimize_scalar: interior point is not below bracket endpoints");
    }

    ScalarMinResult out;
    status = GSL_CONTINUE;
    int iters = 0;
    double prev_width = hi - lo;
    int stalls = 0;
    while (status == GSL_CONTINUE && iters < max_iter) {
        ++iters;
        status = gsl_min_fminimizer_iterate(m);
        if (status != GSL_SUCCESS) break;
        const double a = gsl_min_fminimizer_x_lower(m);
        const double b = gsl_min_fminimizer_x_upper(m);
        status = gsl_min_test_interval(a, b, abs_tol, rel_tol);
        // Quadratic minima cannot be bracketed below the sqrt(eps) floor;
        // treat a stalled interval at that width as converged.
        const double width = b - a;
        if (width >= prev_width) {
            if (++stalls >= 3 && status == GSL_CONTINUE) {
                const double floor_tol = 4.0 * 1.5e-8 * (1.0 + std::abs(b));
                status = gsl_min_test_interval(a, b, floor_tol + abs_tol, rel_tol);
                break;
            }
        } else {
            stalls = 0;
        }
        prev_width = width;
    }
    out.x = gsl_min_fminimizer_x_minimum(m);
    out.value = gsl_min_fminimizer_f_minimum(m);
    out.iterations = iters;
    out.converged = (status == GSL_SUCCESS);
    gsl_min_fminimizer_free(m);
    return out;
}

namespace {

struct MultiCtx {
    const VectorFn* f;
    const GradientFn* grad;
    std::size_t n;
};

std::vector<double> to_vec(const gsl_vector* v, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = gsl_vector_get(v, i);
    return x;
}

double multi_f(const gsl_vector* v, void* params) {
    auto* ctx = static_cast<MultiCtx*>(params);
    return (*ctx->f)(to_vec(v, ctx->n));
}

void multi_df(const gsl_vector* v, void* params, gsl_vector* g) {
    auto* ctx = static_cast<MultiCtx*>(params);
    std::vector<double> gv(ctx->n);
    (*ctx->grad)(to_vec(v, ctx->n), gv);
    for (std::size_t i = 0; i < ctx->n; ++i) gsl_vector_set(g, i, gv[i]);
}

void multi_fdf(const gsl_vector* v, void* params, double* f, gsl_vector* g) {
    *f = multi_f(v, params);
    multi_df(v, params, g);
}

}  // namespace

MultiMinResult minimize_bfgs(const VectorFn& f, const GradientFn& grad,
                             const std::vector<double>& x0,
                             double step, double grad_tol, int max_iter) {
    disable_gsl_abort();
    const std::size_t n = x0.size();
    if (n == 0) throw NumericsError("minimize_bfgs: empty start vector");

    MultiCtx ctx{&f, &grad, n};
    gsl_multimin_function_fdf target;
    target.n = n;
    target.f = &multi_f;
    target.df = &multi_df;
    target.fdf = &multi_fdf;
    target.params = &ctx;

    gsl_vector* x = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, x0[i]);

    gsl_multimin_fdfminimizer* m =
        gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
    gsl_multimin_fdfminimizer_set(m, &target, x, step, 0.1);

    MultiMinResult out;
    int status = GSL_CONTINUE;
    int iters = 0;
    while (status == GSL_CONTINUE && iters < max_iter) {
        ++iters;
        status = gsl_multimin_fdfminimizer_iterate(m);
        if (status != GSL_SUCCESS) break;  // ENOPROG: line search stalled
        status = gsl_multimin_test_gradient(m->gradient, grad_tol);
    }
    out.x = to_vec(m->x, n);
    out.value = m->f;
    out.iterations = iters;
    out.converged = (status == GSL_SUCCESS);
    gsl_multimin_fdfminimizer_free(m);
    gsl_vector_free(x);
    return out;
}

MultiMinResult minimize_simplex(const VectorFn& f, const std::vector<double>& x0,
                                double step, double size_tol, int max_iter) {
    disable_gsl_abort();
    const std::size_t n = x0.size();
    if (n == 0) throw NumericsError("minimize_simplex: empty start vector");

    MultiCtx ctx{&f, nullptr, n};
    gsl_multimin_function target;
    target.n = n;
    target.f = &multi_f;
    target.params = &ctx;

    gsl_vector* x = gsl_vector_alloc(n);
    gsl_vector* steps = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) {
        gsl_vector_set(x, i, x0[i]);
        gsl_vector_set(steps, i, step);
    }

    gsl_multimin_fminimizer* m =
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(m, &target, x, steps);

    MultiMinResult out;
    int status = GSL_CONTINUE;
    int iters = 0;
    while (status == GSL_CONTINUE && iters < max_iter) {
        ++iters;
        status = gsl_multimin_fminimizer_iterate(m);
        if (status != GSL_SUCCESS) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), size_tol);
    }
    out.x = to_vec(m->x, n);
    out.value = m->fval;
    out.iterations = iters;
    out.converged = (status == GSL_SUCCESS);
    gsl_multimin_fminimizer_free(m);
    gsl_vector_free(steps);
    gsl_vector_free(x);
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace szilard
