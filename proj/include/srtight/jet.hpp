/**
 * @file jet.hpp
 * @brief Forward-mode differentiation scalars used to evaluate frames.
 *
 * Three scalar types share one set of elementary functions:
 *   - double
 *   - Jet2: value, gradient and Hessian in three variables
 *   - Taylor<N>: truncated univariate series, coefficients f^(k)/k!, N <= 4
 *
 * Every elementary function is described by its first four derivatives at a
 * point (D3) and each scalar type composes that table with its own chain rule.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace srtight {

/// Value and first three derivatives of a scalar function at one point.
struct D3 {
    double d0, d1, d2, d3;
};

namespace elem {

inline D3 sin(double x) {
    const double s = std::sin(x), c = std::cos(x);
    return {s, c, -s, -c};
}
inline D3 cos(double x) {
    const double s = std::sin(x), c = std::cos(x);
    return {c, -s, -c, s};
}
inline D3 exp(double x) {
    const double e = std::exp(x);
    return {e, e, e, e};
}
inline D3 log(double x) { return {std::log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)}; }
inline D3 sqrt(double x) {
    const double s = std::sqrt(x);
    return {s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)};
}
inline D3 atan(double x) {
    const double q = 1.0 / (1.0 + x * x);
    return {std::atan(x), q, -2.0 * x * q * q, (6.0 * x * x - 2.0) * q * q * q};
}
inline D3 sinh(double x) {
    const double s = std::sinh(x), c = std::cosh(x);
    return {s, c, s, c};
}
inline D3 cosh(double x) {
    const double s = std::sinh(x), c = std::cosh(x);
    return {c, s, c, s};
}
inline D3 inv(double x) {
    const double i = 1.0 / x;
    return {i, -i * i, 2.0 * i * i * i, -6.0 * i * i * i * i};
}
inline D3 pow(double x, double p) {
    return {std::pow(x, p), p * std::pow(x, p - 1.0), p * (p - 1.0) * std::pow(x, p - 2.0),
            p * (p - 1.0) * (p - 2.0) * std::pow(x, p - 3.0)};
}

} // namespace elem

// ---------------------------------------------------------------------------
// Jet2
// ---------------------------------------------------------------------------

/// Second-order jet in three variables; Hessian stored packed (00,01,02,11,12,22).
struct Jet2 {
    double v = 0.0;
    std::array<double, 3> g{};
    std::array<double, 6> h{};

    Jet2() = default;
    Jet2(double value) : v(value) {}

    /// Independent variable number i with value x.
    static Jet2 variable(double x, int i) {
        Jet2 j(x);
        j.g[static_cast<std::size_t>(i)] = 1.0;
        return j;
    }

    static constexpr std::size_t hidx(int a, int b) {
        constexpr std::size_t t[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
        return t[a][b];
    }
    double hess(int a, int b) const { return h[hidx(a, b)]; }

    Jet2& operator+=(const Jet2& o) {
        v += o.v;
        for (int i = 0; i < 3; ++i) g[i] += o.g[i];
        for (int i = 0; i < 6; ++i) h[i] += o.h[i];
        return *this;
    }
    Jet2& operator-=(const Jet2& o) {
        v -= o.v;
        for (int i = 0; i < 3; ++i) g[i] -= o.g[i];
        for (int i = 0; i < 6; ++i) h[i] -= o.h[i];
        return *this;
    }
    Jet2& operator*=(double s) {
        v *= s;
        for (auto& x : g) x *= s;
        for (auto& x : h) x *= s;
        return *this;
    }
    Jet2& operator*=(const Jet2& o) {
        Jet2 r;
        r.v = v * o.v;
        for (int i = 0; i < 3; ++i) r.g[i] = g[i] * o.v + v * o.g[i];
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                const auto k = hidx(a, b);
                r.h[k] = h[k] * o.v + g[a] * o.g[b] + g[b] * o.g[a] + v * o.h[k];
            }
        return *this = r;
    }
};

/// Chain rule for a scalar function with derivative table f applied to x.
inline Jet2 compose(const Jet2& x, const D3& f) {
    Jet2 r;
    r.v = f.d0;
    for (int i = 0; i < 3; ++i) r.g[i] = f.d1 * x.g[i];
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            const auto k = Jet2::hidx(a, b);
            r.h[k] = f.d1 * x.h[k] + f.d2 * x.g[a] * x.g[b];
        }
    return r;
}

inline Jet2 operator-(Jet2 a) {
    a *= -1.0;
    return a;
}
inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator*(Jet2 a, const Jet2& b) { return a *= b; }
inline Jet2 operator+(Jet2 a, double b) { a.v += b; return a; }
inline Jet2 operator+(double b, Jet2 a) { a.v += b; return a; }
inline Jet2 operator-(Jet2 a, double b) { a.v -= b; return a; }
inline Jet2 operator-(double b, const Jet2& a) { return -a + b; }
inline Jet2 operator*(Jet2 a, double b) { return a *= b; }
inline Jet2 operator*(double b, Jet2 a) { return a *= b; }
inline Jet2 operator/(Jet2 a, double b) { return a *= 1.0 / b; }
inline Jet2 operator/(double b, const Jet2& a) { return compose(a, elem::inv(a.v)) * b; }
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * compose(b, elem::inv(b.v)); }

inline double value_of(double x) { return x; }
inline double value_of(const Jet2& x) { return x.v; }

// ---------------------------------------------------------------------------
// Taylor<N>
// ---------------------------------------------------------------------------

/// Truncated univariate series; c[k] = f^(k)(t0)/k!.
template <int N>
struct Taylor {
    static_assert(N >= 1 && N <= 4, "composition tables carry three derivatives");
    std::array<double, N> c{};

    Taylor() = default;
    Taylor(double value) { c[0] = value; }

    static Taylor variable(double t0) {
        Taylor t(t0);
        if constexpr (N > 1) t.c[1] = 1.0;
        return t;
    }
    /// k-th derivative at the expansion point.
    double deriv(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[static_cast<std::size_t>(k)] * f;
    }
    /// Term-wise derivative, truncated to N-1 meaningful coefficients.
    Taylor derivative() const {
        Taylor r;
        for (int k = 0; k + 1 < N; ++k) r.c[k] = (k + 1) * c[k + 1];
        return r;
    }

    Taylor& operator+=(const Taylor& o) {
        for (int k = 0; k < N; ++k) c[k] += o.c[k];
        return *this;
    }
    Taylor& operator-=(const Taylor& o) {
        for (int k = 0; k < N; ++k) c[k] -= o.c[k];
        return *this;
    }
    Taylor& operator*=(double s) {
        for (auto& x : c) x *= s;
        return *this;
    }
    Taylor& operator*=(const Taylor& o) {
        Taylor r;
        for (int i = 0; i < N; ++i)
            for (int j = 0; i + j < N; ++j) r.c[i + j] += c[i] * o.c[j];
        return *this = r;
    }
};

template <int N>
Taylor<N> compose(const Taylor<N>& x, const D3& f) {
    Taylor<N> d = x;
    d.c[0] = 0.0;
    Taylor<N> r(f.d0), p(1.0);
    const double coef[4] = {f.d0, f.d1, f.d2 / 2.0, f.d3 / 6.0};
    for (int m = 1; m < N; ++m) {
        p *= d;
        Taylor<N> t = p;
        t *= coef[m];
        r += t;
    }
    return r;
}

template <int N> Taylor<N> operator-(Taylor<N> a) { return a *= -1.0; }
template <int N> Taylor<N> operator+(Taylor<N> a, const Taylor<N>& b) { return a += b; }
template <int N> Taylor<N> operator-(Taylor<N> a, const Taylor<N>& b) { return a -= b; }
template <int N> Taylor<N> operator*(Taylor<N> a, const Taylor<N>& b) { return a *= b; }
template <int N> Taylor<N> operator+(Taylor<N> a, double b) { a.c[0] += b; return a; }
template <int N> Taylor<N> operator+(double b, Taylor<N> a) { a.c[0] += b; return a; }
template <int N> Taylor<N> operator-(Taylor<N> a, double b) { a.c[0] -= b; return a; }
template <int N> Taylor<N> operator-(double b, const Taylor<N>& a) { return -a + b; }
template <int N> Taylor<N> operator*(Taylor<N> a, double b) { return a *= b; }
template <int N> Taylor<N> operator*(double b, Taylor<N> a) { return a *= b; }
template <int N> Taylor<N> operator/(Taylor<N> a, double b) { return a *= 1.0 / b; }
template <int N> Taylor<N> operator/(double b, const Taylor<N>& a) { return compose(a, elem::inv(a.c[0])) * b; }
template <int N>
Taylor<N> operator/(const Taylor<N>& a, const Taylor<N>& b) {
    return a * compose(b, elem::inv(b.c[0]));
}
template <int N> double value_of(const Taylor<N>& x) { return x.c[0]; }

// ---------------------------------------------------------------------------
// Elementary functions on all scalar types
// ---------------------------------------------------------------------------

template <class T>
concept JetScalar = std::is_same_v<T, Jet2> || std::is_same_v<T, Taylor<1>> || std::is_same_v<T, Taylor<2>> ||
                    std::is_same_v<T, Taylor<3>> || std::is_same_v<T, Taylor<4>>;

template <JetScalar T> T sin(const T& x) { return compose(x, elem::sin(value_of(x))); }
template <JetScalar T> T cos(const T& x) { return compose(x, elem::cos(value_of(x))); }
template <JetScalar T> T exp(const T& x) { return compose(x, elem::exp(value_of(x))); }
template <JetScalar T> T log(const T& x) { return compose(x, elem::log(value_of(x))); }
template <JetScalar T> T sqrt(const T& x) { return compose(x, elem::sqrt(value_of(x))); }
template <JetScalar T> T atan(const T& x) { return compose(x, elem::atan(value_of(x))); }
template <JetScalar T> T sinh(const T& x) { return compose(x, elem::sinh(value_of(x))); }
template <JetScalar T> T cosh(const T& x) { return compose(x, elem::cosh(value_of(x))); }
template <JetScalar T> T pow(const T& x, double p) { return compose(x, elem::pow(value_of(x), p)); }

/// atan2 on jets: the base angle plus atan of the rotated ratio, which is 0 at the base point.
template <JetScalar T>
T atan2(const T& y, const T& x) {
    const double x0 = value_of(x), y0 = value_of(y);
    const T u = x * x0 + y * y0;
    const T w = y * x0 - x * y0;
    return atan(w / u) + std::atan2(y0, x0);
}

/// Integer power by repeated squaring; exact at zero base.
template <class T>
T ipow(const T& x, int n) {
    if (n < 0) return 1.0 / ipow(x, -n);
    T r(1.0), b = x;
    while (n > 0) {
        if (n & 1) r = r * b;
        b = b * b;
        n >>= 1;
    }
    return r;
}

using std::atan;
using std::atan2;
using std::cos;
using std::cosh;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sinh;
using std::sqrt;

// ---------------------------------------------------------------------------
// Entire helper functions evaluated by series near zero
// ---------------------------------------------------------------------------

namespace detail {

/// sum_n c_n x^n by Horner with scalar coefficients.
template <class T, std::size_t M>
T horner(const T& x, const std::array<double, M>& c) {
    T r(c[M - 1]);
    for (std::size_t k = M - 1; k-- > 0;) r = r * x + c[k];
    return r;
}

/// Coefficients (-1)^n / (2n+m)! for n = 0..M-1, shifted by `shift` terms.
template <std::size_t M>
std::array<double, M> alternating_factorial(int m, int shift = 0) {
    std::array<double, M> c{};
    for (std::size_t n = 0; n < M; ++n) {
        const int k = static_cast<int>(n) + shift;
        double f = 1.0;
        for (int i = 2; i <= 2 * k + m; ++i) f *= i;
        c[n] = ((k % 2) ? -1.0 : 1.0) / f;
    }
    return c;
}

constexpr double kSeriesRadius = 1.0;
constexpr std::size_t kSeriesTerms = 14;

} // namespace detail

/// cos(sqrt(x)) continued to x < 0 as cosh(sqrt(-x)).
template <class T>
T cos_sqrt(const T& x) {
    const double x0 = value_of(x);
    if (std::abs(x0) < detail::kSeriesRadius) {
        static const auto c = detail::alternating_factorial<detail::kSeriesTerms>(0);
        return detail::horner(x, c);
    }
    if (x0 > 0) return cos(sqrt(x));
    return cosh(sqrt(-x));
}

/// sin(sqrt(x))/sqrt(x), entire.
template <class T>
T sinc_sqrt(const T& x) {
    const double x0 = value_of(x);
    if (std::abs(x0) < detail::kSeriesRadius) {
        static const auto c = detail::alternating_factorial<detail::kSeriesTerms>(1);
        return detail::horner(x, c);
    }
    if (x0 > 0) {
        const T s = sqrt(x);
        return sin(s) / s;
    }
    const T s = sqrt(-x);
    return sinh(s) / s;
}

/// (1 - cos(sqrt(x)))/x, entire, equal to 1/2 at 0.
template <class T>
T vers_sqrt(const T& x) {
    const double x0 = value_of(x);
    if (std::abs(x0) < detail::kSeriesRadius) {
        static const auto c = detail::alternating_factorial<detail::kSeriesTerms>(2);
        return detail::horner(x, c);
    }
    return (1.0 - cos_sqrt(x)) / x;
}

/// (vers_sqrt(x) - 1/2)/x, entire, equal to -1/24 at 0.
template <class T>
T vers_sqrt_tail(const T& x) {
    const double x0 = value_of(x);
    if (std::abs(x0) < detail::kSeriesRadius) {
        static const auto c = detail::alternating_factorial<detail::kSeriesTerms>(2, 1);
        return detail::horner(x, c);
    }
    return (vers_sqrt(x) - 0.5) / x;
}

/// (sqrt(x) - sin(sqrt(x)))/x^{3/2}, entire, equal to 1/6 at 0.
template <class T>
T sin_tail_sqrt(const T& x) {
    const double x0 = value_of(x);
    if (std::abs(x0) < detail::kSeriesRadius) {
        // (u - sin u)/u^3 = sum_n (-1)^n u^{2n} / (2n+3)!
        static const auto c = detail::alternating_factorial<detail::kSeriesTerms>(3);
        return detail::horner(x, c);
    }
    return (1.0 - sinc_sqrt(x)) / x;
}

} // namespace srtight
