#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "metastat/errors.hpp"

namespace metastat {

/// Dormand-Prince 5(4) embedded Runge-Kutta pair with 4th-order dense output.
/// Step acceptance uses the scaled RMS error norm; FSAL is exploited.
/// The dense interpolant of the last accepted step is kept so callers can
/// bisect for event times (used by the inverse flow).
template <int N, class F>
class Dopri5 {
public:
    using State = std::array<double, N>;

    struct Options {
        double rtol = 1e-10;
        double atol = 1e-12;
        double h_max = 1.0;
        long max_steps = 2000000;
    };

    Dopri5(F f, double t0, const State& y0, Options opt)
        : f_(f), t_(t0), y_(y0), opt_(opt) {
        f_(t_, y_, k_[0]);
        h_ = initial_step();
    }

    double t() const { return t_; }
    const State& y() const { return y_; }
    double prev_t() const { return tprev_; }
    const State& prev_y() const { return yprev_; }
    long steps() const { return nsteps_; }

    /// One accepted adaptive step, not exceeding t + h_cap.
    /// Returns the new time. Direction is the sign of h_cap.
    /// A step truncated by h_cap (grid landing) does not shrink the stored
    /// step proposal, so node-by-node integration keeps full step sizes.
    double step(double h_cap) {
        const double dir = h_cap >= 0 ? 1.0 : -1.0;
        double mag = std::min(std::abs(h_), opt_.h_max);
        for (;;) {
            const bool capped = std::abs(h_cap) < mag;
            const double h = dir * (capped ? std::abs(h_cap) : mag);
            if (++nsteps_ > opt_.max_steps)
                throw NumericalError("dopri5: step budget exhausted at t=" + std::to_string(t_));
            if (std::abs(h) < 1e-14 * (std::abs(t_) + 1.0))
                throw NumericalError("dopri5: step size underflow at t=" + std::to_string(t_));
            const double err = try_step(h);
            if (err <= 1.0) {
                finalize_step(h);
                double fac = 0.9 * std::pow(err > 1e-30 ? err : 1e-30, -0.2);
                fac = std::min(5.0, std::max(0.2, fac));
                if (!capped) h_ = std::abs(h) * fac;
                return t_;
            }
            double fac = std::max(0.1, 0.9 * std::pow(err, -0.2));
            mag = std::abs(h) * fac;
            h_ = mag;
        }
    }

    /// Integrate exactly to t_end (monotone sequence of capped steps).
    void advance_to(double t_end) {
        const double dir = t_end >= t_ ? 1.0 : -1.0;
        while (dir * (t_end - t_) > 1e-14 * (std::abs(t_end) + 1.0)) {
            step(t_end - t_);
        }
        // land exactly on the target to keep grids reproducible
        t_ = t_end;
    }

    /// Dense evaluation inside the last accepted step [prev_t, t].
    State dense(double t) const {
        const double h = t_ - tprev_;
        const double th = h != 0.0 ? (t - tprev_) / h : 0.0;
        State out;
        for (int i = 0; i < N; ++i) {
            out[i] = rcont_[0][i] +
                     th * (rcont_[1][i] +
                           (1.0 - th) * (rcont_[2][i] +
                                         th * (rcont_[3][i] + (1.0 - th) * rcont_[4][i])));
        }
        return out;
    }

private:
    double try_step(double h) {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                                a75 = -2187.0 / 6784, a76 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        State yt;
        for (int i = 0; i < N; ++i) yt[i] = y_[i] + h * a21 * k_[0][i];
        f_(t_ + c2 * h, yt, k_[1]);
        for (int i = 0; i < N; ++i) yt[i] = y_[i] + h * (a31 * k_[0][i] + a32 * k_[1][i]);
        f_(t_ + c3 * h, yt, k_[2]);
        for (int i = 0; i < N; ++i)
            yt[i] = y_[i] + h * (a41 * k_[0][i] + a42 * k_[1][i] + a43 * k_[2][i]);
        f_(t_ + c4 * h, yt, k_[3]);
        for (int i = 0; i < N; ++i)
            yt[i] = y_[i] +
                    h * (a51 * k_[0][i] + a52 * k_[1][i] + a53 * k_[2][i] + a54 * k_[3][i]);
        f_(t_ + c5 * h, yt, k_[4]);
        for (int i = 0; i < N; ++i)
            yt[i] = y_[i] + h * (a61 * k_[0][i] + a62 * k_[1][i] + a63 * k_[2][i] +
                                 a64 * k_[3][i] + a65 * k_[4][i]);
        f_(t_ + h, yt, k_[5]);
        for (int i = 0; i < N; ++i)
            ynew_[i] = y_[i] + h * (a71 * k_[0][i] + a73 * k_[2][i] + a74 * k_[3][i] +
                                    a75 * k_[4][i] + a76 * k_[5][i]);
        f_(t_ + h, ynew_, k_[6]);

        double err = 0.0;
        for (int i = 0; i < N; ++i) {
            const double ei = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] +
                                   e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);
            const double sc =
                opt_.atol + opt_.rtol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
            err += (ei / sc) * (ei / sc);
        }
        return std::sqrt(err / N);
    }

    void finalize_step(double h) {
        static constexpr double d1 = -12715105075.0 / 11282082432.0,
                                d3 = 87487479700.0 / 32700410799.0,
                                d4 = -10690763975.0 / 1880347072.0,
                                d5 = 701980252875.0 / 199316789632.0,
                                d6 = -1453857185.0 / 822651844.0,
                                d7 = 69997945.0 / 29380423.0;
        for (int i = 0; i < N; ++i) {
            const double ydiff = ynew_[i] - y_[i];
            const double bspl = h * k_[0][i] - ydiff;
            rcont_[0][i] = y_[i];
            rcont_[1][i] = ydiff;
            rcont_[2][i] = bspl;
            rcont_[3][i] = ydiff - h * k_[6][i] - bspl;
            rcont_[4][i] = h * (d1 * k_[0][i] + d3 * k_[2][i] + d4 * k_[3][i] +
                                d5 * k_[4][i] + d6 * k_[5][i] + d7 * k_[6][i]);
        }
        tprev_ = t_;
        yprev_ = y_;
        t_ += h;
        y_ = ynew_;
        k_[0] = k_[6]; // FSAL
    }

    double initial_step() const {
        double ny = 0.0, nf = 0.0;
        for (int i = 0; i < N; ++i) {
            ny = std::max(ny, std::abs(y_[i]));
            nf = std::max(nf, std::abs(k_[0][i]));
        }
        double h = 0.01 * (ny + 1.0) / (nf + 1.0);
        return std::min(h, opt_.h_max);
    }

    F f_;
    double t_;
    State y_;
    Options opt_;
    double h_ = 1e-3;
    double tprev_ = 0.0;
    State yprev_{};
    State ynew_{};
    std::array<State, 7> k_{};
    std::array<State, 5> rcont_{};
    long nsteps_ = 0;
};

} // namespace metastat
