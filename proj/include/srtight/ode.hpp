/**
 * @file ode.hpp
 * @brief Dormand-Prince 5(4) integrator with step-size control, exact landing
 *        on requested stop times, and cubic Hermite dense output.
 */
#pragma once

#include "srtight/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace srtight {

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = 0.05;
    bool dense = true;
    long max_steps = 5'000'000;
};

/// Cubic Hermite segment of an accepted step (local error O(h^4)).
struct HermiteSegment {
    double t0 = 0, t1 = 0;
    std::vector<double> y0, y1, f0, f1;

    void eval(double t, std::vector<double>& out) const {
        const double h = t1 - t0, s = (t - t0) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
        out.resize(y0.size());
        for (std::size_t i = 0; i < y0.size(); ++i)
            out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
};

/// Piecewise-Hermite dense trajectory.
struct DenseTrajectory {
    std::vector<HermiteSegment> segments;

    double t_begin() const { return segments.empty() ? 0.0 : segments.front().t0; }
    double t_end() const { return segments.empty() ? 0.0 : segments.back().t1; }

    std::vector<double> operator()(double t) const {
        std::vector<double> out;
        if (segments.empty()) return out;
        auto it = std::lower_bound(segments.begin(), segments.end(), t,
                                   [](const HermiteSegment& s, double v) { return s.t1 < v; });
        if (it == segments.end()) it = std::prev(segments.end());
        it->eval(t, out);
        return out;
    }
};

class Dopri5 {
public:
    using Rhs = std::function<void(double, const double*, double*)>;
    /// Called after every accepted step with (t, y, dy/dt); return false to stop.
    using StepFn = std::function<bool(double, const std::vector<double>&, const std::vector<double>&)>;
    /// Called when a requested stop time is reached exactly.
    using StopFn = std::function<void(std::size_t, double, const std::vector<double>&)>;

    Dopri5(std::size_t n, Rhs f, IntegratorConfig cfg = {}) : n_(n), f_(std::move(f)), cfg_(cfg) {
        for (auto* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_}) k->resize(n);
    }

    long steps() const { return steps_; }
    long evaluations() const { return evals_; }

    /// Integrates y from t0 to t1 (t1 > t0). Returns the final time reached.
    double integrate(double t0, std::vector<double>& y, double t1, const std::vector<double>& stops = {},
                     StepFn on_step = {}, StopFn on_stop = {}, DenseTrajectory* dense = nullptr) {
        if (!(cfg_.rtol > 0 && cfg_.atol > 0)) throw Error(ErrorKind::InvalidInput, "tolerances must be positive");
        double t = t0;
        std::size_t next = 0;
        while (next < stops.size() && stops[next] <= t0) {
            if (on_stop && stops[next] == t0) on_stop(next, t0, y);
            ++next;
        }
        eval(t, y.data(), k1_.data());
        double h = initial_step(t, y, t1); // unclipped step proposal
        bool last = false;
        while (!last) {
            if (steps_ >= cfg_.max_steps) throw Error(ErrorKind::StepFailure, "step budget exhausted", t);
            double target = t1;
            if (next < stops.size() && stops[next] < target) target = stops[next];
            double hs = h;
            bool hits = false;
            if (t + hs >= target - 1e-14 * std::max(1.0, std::abs(target))) {
                hs = target - t;
                hits = true;
            }
            if (hs < 1e-14 * std::max(1.0, std::abs(t)) && !hits)
                throw Error(ErrorKind::StepFailure, "step size underflow", t);
            const double err = attempt(t, y, hs);
            if (!(err <= 1.0)) {
                const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.1;
                h = hs * fac;
                continue;
            }
            ++steps_;
            const double tn = hits ? target : t + hs;
            if (dense) dense->segments.push_back(HermiteSegment{t, tn, y, ynew_, k1_, k7_});
            t = tn;
            y.swap(ynew_);
            k1_.swap(k7_);
            const double fac = std::min(10.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
            h = std::min(cfg_.max_step, hits ? std::max(h, hs * fac) : hs * fac);
            if (on_step && !on_step(t, y, k1_)) return t;
            if (hits) {
                if (target == t1) last = true;
                while (next < stops.size() && stops[next] <= t) {
                    if (on_stop) on_stop(next, t, y);
                    ++next;
                }
            }
        }
        return t;
    }

private:
    void eval(double t, const double* y, double* dy) {
        ++evals_;
        f_(t, y, dy);
    }

    double scale(double a, double b) const { return cfg_.atol + cfg_.rtol * std::max(std::abs(a), std::abs(b)); }

    double initial_step(double t, const std::vector<double>& y, double t1) {
        double d0 = 0, d1 = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sc = scale(y[i], y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (k1_[i] / sc) * (k1_[i] / sc);
        }
        d0 = std::sqrt(d0 / n_);
        d1 = std::sqrt(d1 / n_);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, t1 - t);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h0 * k1_[i];
        eval(t + h0, tmp_.data(), k2_.data());
        double d2 = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sc = scale(y[i], y[i]);
            d2 += ((k2_[i] - k1_[i]) / sc) * ((k2_[i] - k1_[i]) / sc);
        }
        d2 = std::sqrt(d2 / n_) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        return std::min({100 * h0, h1, cfg_.max_step});
    }

    /// One trial step; fills ynew_ and k7_, returns the scaled error norm.
    double attempt(double t, const std::vector<double>& y, double h) {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                                b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                                e6 = 22.0 / 525, e7 = -1.0 / 40;
        const std::size_t n = n_;
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * a21 * k1_[i];
        eval(t + c2 * h, tmp_.data(), k2_.data());
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        eval(t + c3 * h, tmp_.data(), k3_.data());
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        eval(t + c4 * h, tmp_.data(), k4_.data());
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        eval(t + c5 * h, tmp_.data(), k5_.data());
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
        eval(t + h, tmp_.data(), k6_.data());
        for (std::size_t i = 0; i < n; ++i)
            ynew_[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] + b6 * k6_[i]);
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(ynew_[i])) return INFINITY;
        eval(t + h, ynew_.data(), k7_.data());
        double err = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e =
                h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
            const double r = e / scale(y[i], ynew_[i]);
            err += r * r;
        }
        return std::sqrt(err / n);
    }

    std::size_t n_;
    Rhs f_;
    IntegratorConfig cfg_;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_;
    long steps_ = 0, evals_ = 0;
};

} // namespace srtight
