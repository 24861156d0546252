#pragma once

#include "optcast/forecast.hpp"

namespace optcast {

enum class DecisionKind {
    BuyTwo,            // both horizons clear the cutoff: sell one at tau, one at 2*tau
    BuyOneSellAtTau,   // only the tau horizon clears
    BuyOneSellAt2Tau,  // only the 2*tau horizon clears
    NoTrade,
};

const char* to_string(DecisionKind kind);

/// A trading decision and how many days until the next forecast is made.
struct Decision {
    DecisionKind kind = DecisionKind::NoTrade;
    int next_forecast_offset = 1;  // 2, 1, 2, 1 for the kinds above
};

/// cutoff is the margin the predicted price must clear above the
/// extrapolated ask before a buy is triggered.
struct StrategyConfig {
    double cutoff = 0.03;
};

/// The four-case decision. Precondition: the forecast carries no
/// abstention flags (flagged days map to NoTrade before this is called).
/// The threshold comparison is inclusive (>=).
Decision decide(const Forecast& forecast, const StrategyConfig& config);

/// |predicted - true_last| / true_last. Requires true_last > 0.
double relative_error(double predicted, double true_last);

}  // namespace optcast
