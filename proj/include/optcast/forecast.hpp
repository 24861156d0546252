#pragma once

#include "optcast/market_data.hpp"
#include "optcast/qr_solver.hpp"

namespace optcast {

/// One forecast event: predicted last prices at the stock mid-point for
/// t = tau and t = 2*tau, plus the extrapolated quotes the strategy
/// compares against. Abstention flags mark days the model must not trade.
struct Forecast {
    double predicted_tau = 0;
    double predicted_2tau = 0;
    double extrap_bid_tau = 0;
    double extrap_ask_tau = 0;
    double extrap_bid_2tau = 0;
    double extrap_ask_2tau = 0;
    double s_mid = 0;

    bool crossed_quotes = false;   // extrapolated ask dipped to/below bid
    bool unconverged = false;      // solve stopped short of the minimizer
    bool narrow_interval = false;  // stock spread below one cent
    bool sigma_clamped = false;    // volatility extrapolation hit the floor

    bool abstain() const { return crossed_quotes || unconverged; }
};

/// Assemble extrapolation inputs from a three-day window. Stock bid/ask
/// come from day 0 only.
ForecastInputs inputs_from_window(const Window& window, double tau);

/// Window -> fit/extrapolate -> minimize -> read u(s_mid, tau) and
/// u(s_mid, 2*tau) at their exact grid nodes.
Forecast make_forecast(const Window& window, double tau, const SolverConfig& config);

}  // namespace optcast
