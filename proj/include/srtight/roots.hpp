/**
 * @file roots.hpp
 * @brief Bracketed root refinement and scalar minimization (Boost.Math).
 */
#pragma once

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <utility>

namespace srtight {

/// Root of f in [a, b] given f(a) f(b) <= 0, to absolute tolerance tol.
template <class F>
double refine_root(F f, double a, double b, double tol = 1e-12) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    std::uintmax_t it = 200;
    auto stop = [tol](double lo, double hi) { return std::abs(hi - lo) <= tol; };
    const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, stop, it);
    return 0.5 * (r.first + r.second);
}

/// Minimizer of f on [a, b] (Brent), returned as (x, f(x)).
template <class F>
std::pair<double, double> minimize_scalar(F f, double a, double b) {
    std::uintmax_t it = 200;
    return boost::math::tools::brent_find_minima(f, a, b, 50, it);
}

} // namespace srtight
