#include "doctest.h"

#include <array>
#include <cmath>

#include "metastat/ode.hpp"
#include "support/reference_rk4.hpp"

using metastat::Dopri5;
using State1 = std::array<double, 1>;
using State2 = std::array<double, 2>;

namespace {

const auto expf1 = [](double, const State1& y, State1& dy) { dy[0] = y[0]; };
const auto oscillator = [](double, const State2& y, State2& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
};
const auto lotka = [](double, const State2& y, State2& dy) {
    dy[0] = y[0] * (1.0 - y[1]);
    dy[1] = y[1] * (y[0] - 1.0);
};

} // namespace

TEST_CASE("exponential growth to machine-level accuracy") {
    Dopri5<1, decltype(expf1)>::Options opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    Dopri5<1, decltype(expf1)> ode(expf1, 0.0, {1.0}, opt);
    ode.advance_to(1.0);
    CHECK(ode.t() == 1.0);
    CHECK(std::abs(ode.y()[0] - std::exp(1.0)) < 1e-11);
}

TEST_CASE("backward integration of the exponential") {
    Dopri5<1, decltype(expf1)>::Options opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    Dopri5<1, decltype(expf1)> ode(expf1, 0.0, {1.0}, opt);
    ode.advance_to(-1.0);
    CHECK(std::abs(ode.y()[0] - std::exp(-1.0)) < 1e-11);
}

TEST_CASE("harmonic oscillator stays on the analytic circle") {
    Dopri5<2, decltype(oscillator)>::Options opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-13;
    Dopri5<2, decltype(oscillator)> ode(oscillator, 0.0, {1.0, 0.0}, opt);
    ode.advance_to(10.0);
    CHECK(std::abs(ode.y()[0] - std::cos(10.0)) < 1e-9);
    CHECK(std::abs(ode.y()[1] + std::sin(10.0)) < 1e-9);
}

TEST_CASE("nonlinear system agrees with a fixed-step reference") {
    Dopri5<2, decltype(lotka)>::Options opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-13;
    Dopri5<2, decltype(lotka)> ode(lotka, 0.0, {1.5, 0.7}, opt);
    ode.advance_to(8.0);

    auto rhs = [](double, const State2& y) {
        return State2{y[0] * (1.0 - y[1]), y[1] * (y[0] - 1.0)};
    };
    State2 ref = testsupport::rk4<2>(rhs, {1.5, 0.7}, 0.0, 8.0, 200000);
    CHECK(std::abs(ode.y()[0] - ref[0]) < 1e-8);
    CHECK(std::abs(ode.y()[1] - ref[1]) < 1e-8);
}

TEST_CASE("dense output interpolates inside the accepted step") {
    Dopri5<2, decltype(oscillator)>::Options opt;
    opt.rtol = 1e-10;
    opt.atol = 1e-12;
    Dopri5<2, decltype(oscillator)> ode(oscillator, 0.0, {1.0, 0.0}, opt);
    double worst = 0.0;
    while (ode.t() < 6.0) {
        ode.step(6.0 - ode.t());
        double tm = 0.5 * (ode.prev_t() + ode.t());
        auto ym = ode.dense(tm);
        worst = std::max(worst, std::abs(ym[0] - std::cos(tm)));
        worst = std::max(worst, std::abs(ym[1] + std::sin(tm)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("grid-capped stepping does not degrade the step proposal") {
    // integrating node by node must cost far fewer accepted steps than
    // one per node when the tolerance allows long strides
    Dopri5<1, decltype(expf1)>::Options opt;
    opt.rtol = 1e-6;
    opt.atol = 1e-9;
    opt.h_max = 100.0;
    Dopri5<1, decltype(expf1)> a(expf1, 0.0, {1.0}, opt);
    for (int k = 1; k <= 1000; ++k) a.advance_to(k * 1e-3);
    Dopri5<1, decltype(expf1)> b(expf1, 0.0, {1.0}, opt);
    b.advance_to(1.0);
    CHECK(a.steps() <= b.steps() + 1001); // capped landings, no rejection storms
    CHECK(std::abs(a.y()[0] - std::exp(1.0)) < 1e-5);
}

TEST_CASE("step budget exhaustion raises instead of spinning") {
    Dopri5<1, decltype(expf1)>::Options opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    opt.max_steps = 3;
    Dopri5<1, decltype(expf1)> ode(expf1, 0.0, {1.0}, opt);
    CHECK_THROWS_AS(ode.advance_to(50.0), metastat::NumericalError);
}
