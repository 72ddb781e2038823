/** @file kcontact_traces.cpp
 *  @brief Jacobi traces on the left-invariant models kappa = -1, 0, 1, printed
 *         beside the closed forms (1 - cos(sqrt(kappa) r))/kappa and cos(sqrt(kappa) r).
 */
#include "srtight/jacobi.hpp"
#include "srtight/registry.hpp"

#include <cmath>
#include <cstdio>

namespace {

// kappa -> 0 limit: (r^2/2, 1)
double w_theta_exact(double kappa, double r) {
    if (kappa == 0) return r * r / 2;
    return kappa > 0 ? (1 - std::cos(std::sqrt(kappa) * r)) / kappa : (std::cosh(std::sqrt(-kappa) * r) - 1) / -kappa;
}

double w_z_exact(double kappa, double r) {
    if (kappa == 0) return 1;
    return kappa > 0 ? std::cos(std::sqrt(kappa) * r) : std::cosh(std::sqrt(-kappa) * r);
}

} // namespace

int main() {
    using namespace srtight;
    for (double kappa : {-1.0, 0.0, 1.0}) {
        const Model m = kcontact_model(kappa);
        const auto t = jacobi_trace(m.structure, m.orbit, 0.0, 0.7, 3.5);
        std::printf("kappa = %+g, first focal radius %.10g\n", kappa, first_focal_radius(t).value_or_inf());
        std::printf("%6s %14s %14s %14s %14s\n", "r", "|w_theta|", "exact", "w_z", "exact");
        for (double r = 0.5; r <= 3.5; r += 0.5) {
            const auto w = t.at(r);
            std::printf("%6.2f %14.10f %14.10f %14.10f %14.10f\n", r, std::abs(w.th[0]),
                        std::abs(w_theta_exact(kappa, r)), w.z[0], w_z_exact(kappa, r));
        }
        std::printf("\n");
    }
}
