#include "optcast/forecast.hpp"

#include <limits>

namespace optcast {

ForecastInputs inputs_from_window(const Window& window, double tau) {
    ForecastInputs in;
    in.ub_poly = fit_quadratic(window.day_minus2.opt_bid, window.day_minus1.opt_bid,
                               window.day_0.opt_bid, tau);
    in.ua_poly = fit_quadratic(window.day_minus2.opt_ask, window.day_minus1.opt_ask,
                               window.day_0.opt_ask, tau);
    in.sigma_poly = fit_quadratic(window.day_minus2.impl_vol, window.day_minus1.impl_vol,
                                  window.day_0.impl_vol, tau);
    in.s_b = window.day_0.stock_bid;
    in.s_a = window.day_0.stock_ask;
    in.tau = tau;
    return in;
}

Forecast make_forecast(const Window& window, double tau, const SolverConfig& config) {
    const ForecastInputs in = inputs_from_window(window, tau);

    Forecast fc;
    fc.s_mid = (in.s_b + in.s_a) / 2.0;
    fc.extrap_bid_tau = in.ub_poly(tau);
    fc.extrap_ask_tau = in.ua_poly(tau);
    fc.extrap_bid_2tau = in.ub_poly(2.0 * tau);
    fc.extrap_ask_2tau = in.ua_poly(2.0 * tau);
    fc.narrow_interval = (in.s_a - in.s_b) < 0.01;
    fc.crossed_quotes = quotes_crossed(in);
    fc.sigma_clamped = sigma_needs_clamp(in);

    if (fc.crossed_quotes) {
        // The model's premise u_b < u_a failed; nothing to solve.
        fc.predicted_tau = std::numeric_limits<double>::quiet_NaN();
        fc.predicted_2tau = std::numeric_limits<double>::quiet_NaN();
        return fc;
    }

    MinimizeResult result = minimize(in, config);
    const Grid grid = build_grid(in, config);
    fc.unconverged = !result.stats.converged;
    fc.predicted_tau = result.u(grid.mid_i(), grid.tau_j());
    fc.predicted_2tau = result.u(grid.mid_i(), grid.top_j());
    return fc;
}

}  // namespace optcast
