#include "optcast/backtest.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace optcast {

namespace {

void append_trade(BacktestReport& report, const OptionHistory& history, std::size_t buy_index,
                  std::size_t sell_index, double predicted) {
    const DailyRecord& buy = history.records[buy_index];
    const DailyRecord& sell = history.records[sell_index];
    TradeRecord trade;
    trade.buy_date = buy.date;
    trade.sell_date = sell.date;
    trade.buy_price = buy.opt_last;
    trade.sell_price = sell.opt_last;
    trade.pnl = sell.opt_last - buy.opt_last;
    trade.rel_error = relative_error(predicted, sell.opt_last);
    report.trades.push_back(trade);
}

// Deterministic symmetric uniform draws in [-1, 1). mt19937_64 output is
// pinned by the standard, so the stream is identical on every platform.
class SymmetricUniform {
public:
    explicit SymmetricUniform(std::uint64_t seed) : eng_(seed) {}
    double next() { return 2.0 * ((eng_() >> 11) * 0x1.0p-53) - 1.0; }

private:
    std::mt19937_64 eng_;
};

double rel_l2(const GridField& got, const GridField& truth, int j_first, int j_last) {
    double num = 0, den = 0;
    for (int j = j_first; j <= j_last; ++j)
        for (int i = 0; i < got.n_s(); ++i) {
            const double d = got(i, j) - truth(i, j);
            num += d * d;
            den += truth(i, j) * truth(i, j);
        }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

}  // namespace

BacktestReport run_backtest_with(const OptionHistory& history, const Forecaster& forecaster,
                                 const StrategyConfig& strat) {
    if (history.size() < 5)
        throw DataError("backtest needs at least 5 days of history (window plus two "
                        "settlement days); got " + std::to_string(history.size()));

    BacktestReport report;
    report.option_id = history.option_id;
    const std::size_t n = history.size();

    std::size_t i = 2;  // first day with a full trailing window
    while (i < n) {
        const Forecast fc = forecaster(window_at(history, i));
        const Decision decision =
            fc.abstain() ? Decision{DecisionKind::NoTrade, 1} : decide(fc, strat);
        ++report.days_evaluated;
        ++report.decision_counts[static_cast<int>(decision.kind)];

        const bool has_tau_day = i + 1 < n;
        const bool has_2tau_day = i + 2 < n;
        switch (decision.kind) {
            case DecisionKind::BuyTwo:
                if (has_tau_day) append_trade(report, history, i, i + 1, fc.predicted_tau);
                if (has_2tau_day) append_trade(report, history, i, i + 2, fc.predicted_2tau);
                break;
            case DecisionKind::BuyOneSellAtTau:
                if (has_tau_day) append_trade(report, history, i, i + 1, fc.predicted_tau);
                break;
            case DecisionKind::BuyOneSellAt2Tau:
                if (has_2tau_day) append_trade(report, history, i, i + 2, fc.predicted_2tau);
                break;
            case DecisionKind::NoTrade:
                break;
        }
        i += decision.next_forecast_offset;
    }

    double pnl = 0, err = 0;
    for (const auto& t : report.trades) {
        pnl += t.pnl;
        err += t.rel_error;
    }
    report.total_pnl = pnl;
    report.mean_rel_error = report.trades.empty() ? 0.0 : err / report.trades.size();
    return report;
}

BacktestReport run_backtest(const OptionHistory& history, double tau,
                            const SolverConfig& solver, const StrategyConfig& strat) {
    return run_backtest_with(
        history, [&](const Window& w) { return make_forecast(w, tau, solver); }, strat);
}

void write_backtest_csv(std::ostream& out, std::span<const BacktestReport> reports) {
    out << "option_id,days_evaluated,num_trades,total_pnl,mean_rel_error\n";
    char buf[64];
    auto row = [&](const std::string& id, int days, std::size_t trades, double pnl,
                   double err) {
        std::snprintf(buf, sizeof(buf), "%d,%zu,%.6f,%.6f", days, trades, pnl, err);
        out << id << ',' << buf << '\n';
    };
    double total_pnl = 0, total_err = 0;
    int total_days = 0;
    std::size_t total_trades = 0;
    for (const auto& r : reports) {
        row(r.option_id, r.days_evaluated, r.trades.size(), r.total_pnl, r.mean_rel_error);
        total_pnl += r.total_pnl;
        total_days += r.days_evaluated;
        total_trades += r.trades.size();
        for (const auto& t : r.trades) total_err += t.rel_error;
    }
    row("TOTAL", total_days, total_trades, total_pnl,
        total_trades == 0 ? 0.0 : total_err / total_trades);
}

SyntheticReport run_synthetic(const ForecastInputs& inputs, const SyntheticConfig& syn) {
    const double delta = syn.noise_delta;
    if (delta < 0.0 || delta >= 1.0)
        throw SolverError("noise_delta must lie in [0, 1)");
    if (!(syn.beta > 0.0 && syn.beta < 1.0))
        throw SolverError("beta must lie in (0, 1)");

    SolverConfig config = syn.solver;
    if (delta > 0.0) config.alpha = std::pow(delta, 2.0 * syn.beta);

    const Grid grid = build_grid(inputs, config);

    // Ground truth: diffuse a bumped terminal profile downward.
    std::vector<double> terminal(grid.n_s);
    const double width = inputs.s_a - inputs.s_b;
    for (int i = 0; i < grid.n_s; ++i) {
        const double x = (grid.s(i) - inputs.s_b) / width;
        terminal[i] = reference_function(inputs, grid.s(i), 2.0 * inputs.tau) +
                      syn.terminal_bump * std::sin(std::numbers::pi * x);
    }
    const GridField u_star = solve_wellposed_downward(terminal, inputs, grid);

    // Perturb the manufactured quote series and the simulated initial row.
    // The raw draws depend only on the seed, so sweeping delta rescales one
    // fixed noise realization.
    SymmetricUniform noise(syn.seed);
    auto perturbed_poly = [&](const QuadPoly& p) {
        const double v_m2 = p(-2.0 * inputs.tau) * (1.0 + delta * noise.next());
        const double v_m1 = p(-inputs.tau) * (1.0 + delta * noise.next());
        const double v_0 = p(0.0) * (1.0 + delta * noise.next());
        return fit_quadratic(v_m2, v_m1, v_0, inputs.tau);
    };
    ForecastInputs noisy = inputs;
    noisy.ub_poly = perturbed_poly(inputs.ub_poly);
    noisy.ua_poly = perturbed_poly(inputs.ua_poly);

    std::vector<double> f_row(grid.n_s);
    for (int i = 0; i < grid.n_s; ++i)
        f_row[i] = u_star(i, 0) * (1.0 + delta * noise.next());

    const GridField F = sample_reference(noisy, grid);
    const auto ub_col = sample_boundary(noisy.ub_poly, grid);
    const auto ua_col = sample_boundary(noisy.ua_poly, grid);

    MinimizeResult result =
        minimize_on_grid(grid, inputs.sigma_poly, F, f_row, ub_col, ua_col, config);

    SyntheticReport report;
    report.delta = delta;
    report.alpha = config.alpha;
    report.err_q_tau = rel_l2(result.u, u_star, 0, grid.tau_j());
    report.err_q_2tau = rel_l2(result.u, u_star, 0, grid.top_j());
    report.err_top_row = rel_l2(result.u, u_star, grid.top_j(), grid.top_j());
    report.stats = result.stats;
    return report;
}

std::vector<SyntheticReport> synthetic_sweep(const ForecastInputs& inputs,
                                             const SyntheticConfig& base,
                                             std::span<const double> deltas) {
    std::vector<SyntheticReport> rows;
    SyntheticConfig noiseless = base;
    noiseless.noise_delta = 0.0;
    rows.push_back(run_synthetic(inputs, noiseless));
    for (double d : deltas) {
        if (d == 0.0) continue;
        SyntheticConfig cfg = base;
        cfg.noise_delta = d;
        rows.push_back(run_synthetic(inputs, cfg));
    }
    return rows;
}

}  // namespace optcast
