/**
 * @file bounds.hpp
 * @brief Inputs to the two comparison estimates: a Schwarzian bound
 *        S/2 <= -3/(4r^2) + k1 r + k2 r^2, or curvature multipliers (A, C).
 */
#pragma once

#include <cstddef>

namespace srtight {

struct BoundFit {
    enum class Kind { Schwarzian, Curvature };
    Kind kind = Kind::Schwarzian;
    double k1 = 0.0, k2 = 0.0; ///< Schwarzian bound, units 1/length^3 and 1/length^4
    double A = 1.0, C = 1.0;   ///< curvature bound, both >= 1 when built from curvatures
    double r_lo = 0.0, r_hi = 0.0;
    std::size_t samples = 0;   ///< number of geodesics (lambda samples) combined
    std::size_t points = 0;    ///< radii per geodesic used in the fit
};

inline BoundFit schwarzian_bound(double k1, double k2) {
    BoundFit b;
    b.k1 = k1;
    b.k2 = k2;
    return b;
}

inline BoundFit curvature_bound(double A, double C) {
    BoundFit b;
    b.kind = BoundFit::Kind::Curvature;
    b.A = A;
    b.C = C;
    return b;
}

} // namespace srtight
