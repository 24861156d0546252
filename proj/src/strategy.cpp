#include "optcast/strategy.hpp"

#include <stdexcept>

namespace optcast {

const char* to_string(DecisionKind kind) {
    switch (kind) {
        case DecisionKind::BuyTwo: return "buy-two";
        case DecisionKind::BuyOneSellAtTau: return "buy-one-sell-at-tau";
        case DecisionKind::BuyOneSellAt2Tau: return "buy-one-sell-at-2tau";
        case DecisionKind::NoTrade: return "no-trade";
    }
    return "?";
}

Decision decide(const Forecast& forecast, const StrategyConfig& config) {
    const bool clears_tau = forecast.predicted_tau >= forecast.extrap_ask_tau + config.cutoff;
    const bool clears_2tau =
        forecast.predicted_2tau >= forecast.extrap_ask_2tau + config.cutoff;

    if (clears_tau && clears_2tau) return {DecisionKind::BuyTwo, 2};
    if (clears_tau) return {DecisionKind::BuyOneSellAtTau, 1};
    if (clears_2tau) return {DecisionKind::BuyOneSellAt2Tau, 2};
    return {DecisionKind::NoTrade, 1};
}

double relative_error(double predicted, double true_last) {
    if (!(true_last > 0.0))
        throw std::invalid_argument("relative_error: true_last must be positive");
    const double diff = predicted - true_last;
    return (diff < 0 ? -diff : diff) / true_last;
}

}  // namespace optcast
