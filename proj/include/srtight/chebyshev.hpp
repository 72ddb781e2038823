/**
 * @file chebyshev.hpp
 * @brief Polynomial interpolation on Chebyshev-Lobatto nodes of a panel:
 *        barycentric evaluation and nodal differentiation.
 */
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace srtight {

class ChebyshevPanel {
public:
    ChebyshevPanel() = default;
    ChebyshevPanel(double a, double b, int degree) : a_(a), b_(b) {
        const int n = degree;
        x_.resize(n + 1);
        w_.resize(n + 1);
        for (int k = 0; k <= n; ++k) {
            // ascending nodes; endpoints are exact
            x_[k] = k == 0 ? a : k == n ? b : 0.5 * (a + b) - 0.5 * (b - a) * std::cos(std::numbers::pi * k / n);
            w_[k] = (k % 2 ? -1.0 : 1.0) * (k == 0 || k == n ? 0.5 : 1.0);
        }
    }

    double a() const { return a_; }
    double b() const { return b_; }
    const std::vector<double>& nodes() const { return x_; }

    /// Interpolant of nodal values at t.
    double eval(const std::vector<double>& f, double t) const {
        double num = 0, den = 0;
        for (std::size_t k = 0; k < x_.size(); ++k) {
            const double d = t - x_[k];
            if (d == 0.0) return f[k];
            const double c = w_[k] / d;
            num += c * f[k];
            den += c;
        }
        return num / den;
    }

    /// Nodal values of the derivative of the interpolant.
    std::vector<double> differentiate(const std::vector<double>& f) const {
        const std::size_t n = x_.size();
        std::vector<double> d(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double diag = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double Dij = (w_[j] / w_[i]) / (x_[i] - x_[j]);
                d[i] += Dij * f[j];
                diag -= Dij;
            }
            d[i] += diag * f[i];
        }
        return d;
    }

private:
    double a_ = 0, b_ = 1;
    std::vector<double> x_, w_;
};

} // namespace srtight
