#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <numbers>

#include "doctest.h"
#include "test_common.hpp"

using namespace optcast;
using namespace optcast::test;

namespace {

constexpr double kTau = 1.0 / 255.0;

Window make_window(double bid_m2, double bid_m1, double bid_0, double ask_m2, double ask_m1,
                   double ask_0, double vol, double s_b, double s_a) {
    auto rec = [&](double b, double a) {
        DailyRecord r;
        r.date = parse_date("2024-03-04");
        r.opt_bid = b;
        r.opt_ask = a;
        r.opt_last = (b + a) / 2;
        r.impl_vol = vol;
        r.stock_bid = s_b;
        r.stock_ask = s_a;
        r.stock_last = (s_b + s_a) / 2;
        return r;
    };
    Window w;
    w.day_minus2 = rec(bid_m2, ask_m2);
    w.day_minus1 = rec(bid_m1, ask_m1);
    w.day_0 = rec(bid_0, ask_0);
    return w;
}

}  // namespace

TEST_CASE("inputs_from_window wires the quote series onto the stencil") {
    Window w = make_window(1.00, 1.02, 1.05, 1.10, 1.11, 1.13, 0.22, 99.0, 101.0);
    ForecastInputs in = inputs_from_window(w, kTau);
    CHECK(in.ub_poly(0.0) == 1.05);
    CHECK(in.ub_poly(-kTau) == doctest::Approx(1.02).epsilon(1e-12));
    CHECK(in.ub_poly(-2 * kTau) == doctest::Approx(1.00).epsilon(1e-12));
    CHECK(in.ua_poly(0.0) == 1.13);
    CHECK(in.sigma_poly(0.0) == 0.22);
    CHECK(in.s_b == 99.0);
    CHECK(in.s_a == 101.0);
    CHECK(in.tau == kTau);
}

TEST_CASE("a constant window forecasts the constant price") {
    Window w = make_window(2.5, 2.5, 2.5, 2.56, 2.56, 2.56, 0.2, 99.0, 101.0);
    Forecast fc = make_forecast(w, kTau, SolverConfig{});
    CHECK_FALSE(fc.abstain());
    CHECK(fc.s_mid == 100.0);
    // the constant mid-quote is the exact minimizer's mid value
    CHECK(fc.predicted_tau == doctest::Approx(2.53).epsilon(1e-6));
    CHECK(fc.predicted_2tau == doctest::Approx(2.53).epsilon(1e-6));
    CHECK(fc.extrap_bid_tau == 2.5);
    CHECK(fc.extrap_ask_2tau == 2.56);
}

TEST_CASE("scaling the option quotes scales the predictions") {
    SolverConfig cfg;
    cfg.cg_rel_tol = 1e-11;
    Window base = make_window(2.40, 2.43, 2.52, 2.46, 2.49, 2.58, 0.2, 99.0, 101.0);
    Forecast fb = make_forecast(base, kTau, cfg);

    const double lam = 3.0;
    Window scaled = base;
    for (auto* d : {&scaled.day_minus2, &scaled.day_minus1, &scaled.day_0}) {
        d->opt_bid *= lam;
        d->opt_ask *= lam;
        d->opt_last *= lam;
    }
    Forecast fs = make_forecast(scaled, kTau, cfg);
    CHECK(std::abs(fs.predicted_tau - lam * fb.predicted_tau) <=
          1e-8 * std::abs(fs.predicted_tau));
    CHECK(std::abs(fs.predicted_2tau - lam * fb.predicted_2tau) <=
          1e-8 * std::abs(fs.predicted_2tau));
}

TEST_CASE("make_forecast is deterministic bit for bit") {
    Window w = make_window(2.40, 2.43, 2.52, 2.46, 2.49, 2.58, 0.21, 99.2, 100.8);
    Forecast a = make_forecast(w, kTau, SolverConfig{});
    Forecast b = make_forecast(w, kTau, SolverConfig{});
    CHECK(a.predicted_tau == b.predicted_tau);
    CHECK(a.predicted_2tau == b.predicted_2tau);
    CHECK(a.extrap_bid_tau == b.extrap_bid_tau);
    CHECK(a.extrap_ask_tau == b.extrap_ask_tau);
    CHECK(a.extrap_bid_2tau == b.extrap_bid_2tau);
    CHECK(a.extrap_ask_2tau == b.extrap_ask_2tau);
    CHECK(a.s_mid == b.s_mid);
    CHECK(a.unconverged == b.unconverged);
}

TEST_CASE("a volatility extrapolation sinking below the floor is flagged") {
    Window ok = make_window(2.5, 2.5, 2.5, 2.56, 2.56, 2.56, 0.2, 99.0, 101.0);
    CHECK_FALSE(make_forecast(ok, kTau, SolverConfig{}).sigma_clamped);

    Window sinking = make_window(2.5, 2.5, 2.5, 2.56, 2.56, 2.56, 0.2, 99.0, 101.0);
    sinking.day_minus2.impl_vol = 0.30;
    sinking.day_minus1.impl_vol = 0.15;
    sinking.day_0.impl_vol = 0.02;  // extrapolates to negative vol by 2*tau
    Forecast fc = make_forecast(sinking, kTau, SolverConfig{});
    CHECK(fc.sigma_clamped);
    CHECK_FALSE(fc.abstain());  // a warning, not an abstention
}

TEST_CASE("crossed extrapolation flags the day instead of erroring") {
    // ask collapsing toward the rising bid crosses it within two days
    Window w = make_window(1.00, 1.04, 1.10, 1.20, 1.16, 1.13, 0.2, 99.0, 101.0);
    Forecast fc = make_forecast(w, kTau, SolverConfig{});
    CHECK(fc.crossed_quotes);
    CHECK(fc.abstain());
    CHECK(std::isnan(fc.predicted_tau));
    CHECK(std::isnan(fc.predicted_2tau));
    // extrapolated quotes are still reported
    CHECK(fc.extrap_ask_tau == doctest::Approx(1.11).epsilon(1e-12));
}

TEST_CASE("penny-wide stock intervals are flagged") {
    Window w = make_window(2.5, 2.5, 2.5, 2.56, 2.56, 2.56, 0.2, 99.998, 100.002);
    Forecast fc = make_forecast(w, kTau, SolverConfig{});
    CHECK(fc.narrow_interval);
}

TEST_CASE("an unresolvable solve raises the abstention flag, not garbage trades") {
    // centered penny spread: the relative gradient test can fire while the
    // top rows are unresolved; the optimality certificate must catch it
    Window w = make_window(2.40, 2.45, 2.50, 2.46, 2.51, 2.56, 0.25, 99.99, 100.01);
    Forecast fc = make_forecast(w, kTau, SolverConfig{});
    CHECK(fc.unconverged);
    CHECK(fc.abstain());
}

TEST_CASE("window forecast recovers a manufactured downward solution") {
    // Quote polynomials sampled at the stencil refit exactly, so a window
    // built from them reproduces the inputs; the downward solve then gives
    // the ground truth the forecast should roughly recover.
    ForecastInputs in = synthetic_inputs();
    SolverConfig cfg;
    Grid g = build_grid(in, cfg);

    Window w = make_window(in.ub_poly(-2 * kTau), in.ub_poly(-kTau), in.ub_poly(0.0),
                           in.ua_poly(-2 * kTau), in.ua_poly(-kTau), in.ua_poly(0.0), 0.2,
                           in.s_b, in.s_a);

    // The window pipeline is forced onto a linear initial condition, while
    // the manufactured field carries the curvature the drifting boundaries
    // injected during the downward march. That model gap (~0.03 here)
    // bounds how closely the forecast can track the manufactured truth;
    // run_synthetic closes it by constraining on the simulated initial row.
    std::vector<double> flat_terminal(g.n_s);
    for (int i = 0; i < g.n_s; ++i)
        flat_terminal[i] = reference_function(in, g.s(i), 2 * kTau);
    GridField u_flat = solve_wellposed_downward(flat_terminal, in, g);
    Forecast fc = make_forecast(w, kTau, cfg);
    CHECK_FALSE(fc.abstain());
    CHECK(std::abs(fc.predicted_tau - u_flat(g.mid_i(), g.tau_j())) <= 0.05);

    std::vector<double> bumped = flat_terminal;
    for (int i = 0; i < g.n_s; ++i) {
        const double x = (g.s(i) - in.s_b) / (in.s_a - in.s_b);
        bumped[i] += 0.05 * std::sin(std::numbers::pi * x);
    }
    GridField u_star = solve_wellposed_downward(bumped, in, g);
    CHECK(std::abs(fc.predicted_tau - u_star(g.mid_i(), g.tau_j())) <= 0.05);
}
