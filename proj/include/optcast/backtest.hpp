#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>

#include "optcast/strategy.hpp"

namespace optcast {

/// One buy/sell round trip. pnl = sell_price - buy_price exactly;
/// rel_error compares the prediction made for this leg's horizon with the
/// realized last price.
struct TradeRecord {
    Date buy_date;
    Date sell_date;
    double buy_price = 0;
    double sell_price = 0;
    double pnl = 0;
    double rel_error = 0;
};

struct BacktestReport {
    std::string option_id;
    std::vector<TradeRecord> trades;
    double total_pnl = 0;
    double mean_rel_error = 0;  // over selling events; 0 when there were none
    int days_evaluated = 0;
    std::array<int, 4> decision_counts{};  // indexed by DecisionKind

    int count(DecisionKind kind) const {
        return decision_counts[static_cast<int>(kind)];
    }
};

/// Forecast source for the day-by-day loop; swappable so the accounting
/// can be exercised with scripted forecasts.
using Forecaster = std::function<Forecast(const Window&)>;

/// Drive the trading loop over the history: forecast, decide, buy at
/// today's last price, sell at the scheduled horizon's last price, then
/// advance by the decision's offset. Legs whose sell date falls beyond the
/// history are not opened. Flagged forecasts trade as NoTrade.
BacktestReport run_backtest_with(const OptionHistory& history, const Forecaster& forecaster,
                                 const StrategyConfig& strat);

/// The full pipeline: run_backtest_with using the PDE forecaster.
BacktestReport run_backtest(const OptionHistory& history, double tau,
                            const SolverConfig& solver, const StrategyConfig& strat);

/// CSV report, one row per option plus a TOTAL row:
/// option_id,days_evaluated,num_trades,total_pnl,mean_rel_error
void write_backtest_csv(std::ostream& out, std::span<const BacktestReport> reports);

/// Synthetic-validation settings. noise_delta is the relative data error;
/// the regularization weight becomes delta^(2*beta) when delta > 0.
struct SyntheticConfig {
    double noise_delta = 0.0;
    double beta = 0.5;
    std::uint64_t seed = 1;
    double terminal_bump = 0.05;  // amplitude of the sine bump on the terminal profile
    SolverConfig solver;
};

struct SyntheticReport {
    double delta = 0;
    double alpha = 0;
    double err_q_tau = 0;    // relative L2 error over the lower half-rectangle
    double err_q_2tau = 0;   // over the full rectangle
    double err_top_row = 0;  // on the t = 2*tau row
    SolveStats stats;
};

/// Manufacture ground truth with the downward solve, perturb the quote
/// series and the simulated initial row multiplicatively, re-solve with the
/// regularized minimization, and measure recovery errors.
SyntheticReport run_synthetic(const ForecastInputs& inputs, const SyntheticConfig& syn);

/// Noiseless row (alpha from the solver config) followed by one row per
/// delta with alpha = delta^(2*beta). Same seed => same underlying draws,
/// scaled by each delta.
std::vector<SyntheticReport> synthetic_sweep(const ForecastInputs& inputs,
                                             const SyntheticConfig& base,
                                             std::span<const double> deltas);

}  // namespace optcast
