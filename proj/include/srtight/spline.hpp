/**
 * @file spline.hpp
 * @brief Natural cubic spline used for tabulated profiles and sampled potentials.
 */
#pragma once

#include "srtight/errors.hpp"
#include "srtight/jet.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace srtight {

/// Natural cubic spline, evaluated on any scalar type. Outside the knots the
/// end segments are extended.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> s, std::vector<double> v) : s_(std::move(s)), v_(std::move(v)) {
        const std::size_t n = s_.size();
        if (n < 3) throw Error(ErrorKind::InvalidInput, "spline needs at least three nodes");
        for (std::size_t i = 1; i < n; ++i)
            if (!(s_[i] > s_[i - 1])) throw Error(ErrorKind::InvalidInput, "spline nodes must increase");
        // second derivatives m_i, natural end conditions
        std::vector<double> a(n, 0), b(n, 1), c(n, 0), d(n, 0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = s_[i] - s_[i - 1], h1 = s_[i + 1] - s_[i];
            a[i] = h0 / 6;
            b[i] = (h0 + h1) / 3;
            c[i] = h1 / 6;
            d[i] = (v_[i + 1] - v_[i]) / h1 - (v_[i] - v_[i - 1]) / h0;
        }
        for (std::size_t i = 1; i < n; ++i) {
            const double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        m_.assign(n, 0);
        for (std::size_t i = n; i-- > 0;) m_[i] = (d[i] - (i + 1 < n ? c[i] * m_[i + 1] : 0.0)) / b[i];
    }

    double s_max() const { return s_.back(); }

    /// Polynomial coefficients of segment k in powers of (s - s_k).
    std::array<double, 4> segment(std::size_t k) const {
        const double h = s_[k + 1] - s_[k];
        const double c0 = v_[k];
        const double c1 = (v_[k + 1] - v_[k]) / h - h * (2 * m_[k] + m_[k + 1]) / 6;
        const double c2 = m_[k] / 2;
        const double c3 = (m_[k + 1] - m_[k]) / (6 * h);
        return {c0, c1, c2, c3};
    }
    std::size_t locate(double s) const {
        auto it = std::upper_bound(s_.begin(), s_.end(), s);
        std::size_t k = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
        return std::min(k, s_.size() - 2);
    }
    template <class T>
    T operator()(const T& s) const {
        const std::size_t k = locate(value_of(s));
        const auto c = segment(k);
        const T t = s - s_[k];
        return ((t * c[3] + c[2]) * t + c[1]) * t + c[0];
    }
    /// (f(s) - f(0))/s; exact polynomial division on the first segment when it starts at 0.
    template <class T>
    T divided(const T& s) const {
        const std::size_t k = locate(value_of(s));
        if (k == 0 && s_[0] == 0.0) {
            const auto c = segment(0);
            return (s * c[3] + c[2]) * s + c[1];
        }
        return ((*this)(s) - v_[0]) / s;
    }

private:
    std::vector<double> s_, v_, m_;
};

} // namespace srtight
