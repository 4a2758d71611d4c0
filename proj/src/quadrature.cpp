#include "fieldsim/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace fieldsim {
namespace {

void disable_gsl_abort() {
    static std::once_flag flag;
    std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

double trampoline(double x, void* params) {
    return (*static_cast<const RealFn*>(params))(x);
}

struct Workspace {
    gsl_integration_workspace* ws;
    explicit Workspace(std::size_t n) : ws(gsl_integration_workspace_alloc(n)) {
        if (!ws) throw std::bad_alloc();
    }
    ~Workspace() { gsl_integration_workspace_free(ws); }
};

void check(int status, const char* what) {
    // EROUND is a precision warning; the returned estimate is still the best
    // available and our tolerances absorb it.
    if (status != GSL_SUCCESS && status != GSL_EROUND)
        throw std::runtime_error(std::string(what) + " failed: " +
                                 gsl_strerror(status));
}

constexpr std::size_t kLimit = 2000;

}  // namespace

double integrate_finite(const RealFn& f, double a, double b, double epsabs,
                        double epsrel) {
    disable_gsl_abort();
    Workspace w(kLimit);
    gsl_function g{&trampoline, const_cast<RealFn*>(&f)};
    double result = 0.0, abserr = 0.0;
    check(gsl_integration_qags(&g, a, b, epsabs, epsrel, kLimit, w.ws, &result,
                               &abserr),
          "qags");
    return result;
}

double integrate_upper_infinite(const RealFn& f, double a, double epsabs,
                                double epsrel) {
    disable_gsl_abort();
    Workspace w(kLimit);
    gsl_function g{&trampoline, const_cast<RealFn*>(&f)};
    double result = 0.0, abserr = 0.0;
    check(gsl_integration_qagiu(&g, a, epsabs, epsrel, kLimit, w.ws, &result,
                                &abserr),
          "qagiu");
    return result;
}

double integrate_real_line(const RealFn& f, double epsabs, double epsrel) {
    disable_gsl_abort();
    Workspace w(kLimit);
    gsl_function g{&trampoline, const_cast<RealFn*>(&f)};
    double result = 0.0, abserr = 0.0;
    check(gsl_integration_qagi(&g, epsabs, epsrel, kLimit, w.ws, &result,
                               &abserr),
          "qagi");
    return result;
}

double integrate_with_breaks(const RealFn& f, std::vector<double> points,
                             double epsabs, double epsrel) {
    disable_gsl_abort();
    Workspace w(kLimit);
    gsl_function g{&trampoline, const_cast<RealFn*>(&f)};
    double result = 0.0, abserr = 0.0;
    check(gsl_integration_qagp(&g, points.data(), points.size(), epsabs, epsrel,
                               kLimit, w.ws, &result, &abserr),
          "qagp");
    return result;
}

std::vector<std::pair<double, double>> gauss_legendre(int order, double a,
                                                      double b) {
    disable_gsl_abort();
    gsl_integration_glfixed_table* t =
        gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order));
    if (!t) throw std::bad_alloc();
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        double x = 0.0, wgt = 0.0;
        gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(i), &x,
                                      &wgt, t);
        out.emplace_back(x, wgt);
    }
    gsl_integration_glfixed_table_free(t);
    return out;
}

}  // namespace fieldsim
