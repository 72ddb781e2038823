/**
 * @file small.hpp
 * @brief Fixed-size 3-vectors and 3x3 matrices over any scalar type.
 */
#pragma once

#include <array>
#include <cmath>

namespace srtight {

template <class T>
using Vec3 = std::array<T, 3>;

/// Row-major 3x3 matrix, m[row][col].
template <class T>
using Mat3 = std::array<std::array<T, 3>, 3>;

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;

template <class T>
Vec3<T> operator+(const Vec3<T>& a, const Vec3<T>& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
template <class T>
Vec3<T> operator-(const Vec3<T>& a, const Vec3<T>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
template <class T, class S>
Vec3<T> operator*(const S& s, const Vec3<T>& a) {
    return {a[0] * s, a[1] * s, a[2] * s};
}
template <class T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3d& a) { return std::sqrt(dot(a, a)); }

template <class T>
Vec3<T> matvec(const Mat3<T>& m, const Vec3<T>& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2], m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}
/// m^T v
template <class T>
Vec3<T> matTvec(const Mat3<T>& m, const Vec3<T>& v) {
    return {m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2], m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
            m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2]};
}
template <class T>
Mat3<T> matmul(const Mat3<T>& a, const Mat3<T>& b) {
    Mat3<T> r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
    return r;
}
template <class T>
Mat3<T> transpose(const Mat3<T>& a) {
    Mat3<T> r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = a[j][i];
    return r;
}
template <class T>
T det(const Mat3<T>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}
/// Inverse by adjugate; caller checks conditioning.
template <class T>
Mat3<T> inverse(const Mat3<T>& m) {
    const T d = det(m);
    Mat3<T> r{};
    r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
    r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
    r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
    r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
    r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
    r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
    r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
    r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
    r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
    return r;
}

/// Frobenius-norm condition number estimate of a 3x3 matrix.
inline double condition_number(const Mat3d& m) {
    auto fro = [](const Mat3d& a) {
        double s = 0;
        for (auto& row : a)
            for (double x : row) s += x * x;
        return std::sqrt(s);
    };
    const double d = det(m);
    if (d == 0.0 || !std::isfinite(d)) return INFINITY;
    return fro(m) * fro(inverse(m));
}

} // namespace srtight
