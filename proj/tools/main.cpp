// optcast command-line front end.
//
// Subcommands:
//   forecast       one forecast event for a given option history and date
//   backtest       day-by-day trading loop over one or more histories
//   synth          synthetic-data validation of the regularized solver
//   demo-illposed  reversed-heat norm growth table
//
// Exit codes: 0 ok, 1 usage error, 2 data error, 3 solver error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "optcast/backtest.hpp"

namespace {

using namespace optcast;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSolver = 3;

struct RunConfig {
    double alpha = 0.01;
    double tau = 1.0 / 255.0;
    int n_s = 21;
    int n_t = 21;
    double cutoff = 0.03;
    double cg_rel_tol = 1e-9;
    int cg_max_iters = 0;
    double noise_delta = -1.0;  // negative: run the default sweep
    double beta = 0.5;
    std::uint64_t seed = 1;
    double bump = 0.05;
    std::string out = "backtest_report.csv";  // backtest report path
    std::string synth_out;                    // synth table path; empty = print only

    SolverConfig solver() const {
        SolverConfig s;
        s.alpha = alpha;
        s.n_s = n_s;
        s.n_t = n_t;
        s.cg_rel_tol = cg_rel_tol;
        s.cg_max_iters = cg_max_iters;
        return s;
    }
    StrategyConfig strategy() const { return StrategyConfig{cutoff}; }
};

std::string odd_node_count(const std::string& value) {
    int n = 0;
    try {
        n = std::stoi(value);
    } catch (...) {
        return "not an integer";
    }
    if (n < 5 || n % 2 == 0) return "node count must be odd and >= 5";
    return "";
}

void add_solver_flags(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--alpha", rc.alpha, "Regularization weight")
        ->capture_default_str()
        ->check(CLI::Range(1e-12, 0.999999));
    cmd->add_option("--tau", rc.tau, "Time unit in years (one trading day = 1/255)")
        ->capture_default_str()
        ->check(CLI::Range(1e-9, 0.2499999));
    cmd->add_option("--ns", rc.n_s, "Stock-price nodes (odd, >= 5)")
        ->capture_default_str()
        ->check(odd_node_count);
    cmd->add_option("--nt", rc.n_t, "Time nodes (odd, >= 5)")
        ->capture_default_str()
        ->check(odd_node_count);
    cmd->add_option("--cg-tol", rc.cg_rel_tol, "CG relative gradient-norm stopping threshold")
        ->capture_default_str()
        ->check(CLI::Range(1e-16, 1.0));
    cmd->add_option("--cg-max-iters", rc.cg_max_iters,
                    "CG iteration cap (0 = 10 x free nodes)")
        ->capture_default_str()
        ->check(CLI::Range(0, 100000000));
}

OptionHistory load_history(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string id = path;
    if (auto slash = id.find_last_of("/\\"); slash != std::string::npos)
        id = id.substr(slash + 1);
    if (auto dot = id.find_last_of('.'); dot != std::string::npos) id = id.substr(0, dot);
    return parse_history(in, id);
}

void print_forecast(const Forecast& fc, const Decision& d) {
    std::printf("s_mid            %.6f\n", fc.s_mid);
    std::printf("predicted(tau)   %.6f\n", fc.predicted_tau);
    std::printf("predicted(2tau)  %.6f\n", fc.predicted_2tau);
    std::printf("extrap bid/ask at tau   %.6f / %.6f\n", fc.extrap_bid_tau,
                fc.extrap_ask_tau);
    std::printf("extrap bid/ask at 2tau  %.6f / %.6f\n", fc.extrap_bid_2tau,
                fc.extrap_ask_2tau);
    if (fc.crossed_quotes)
        std::printf("flag: extrapolated quotes crossed; abstaining\n");
    if (fc.unconverged) std::printf("flag: solve stopped short of the minimizer; abstaining\n");
    if (fc.narrow_interval) std::printf("flag: stock spread below one cent\n");
    if (fc.sigma_clamped)
        std::printf("warning: extrapolated volatility clamped at %.0e\n", kSigmaFloor);
    std::printf("decision         %s\n", to_string(d.kind));
}

int run_forecast(const RunConfig& rc, const std::string& file, const std::string& date_text) {
    const OptionHistory history = load_history(file);
    const Date date = parse_date(date_text);
    std::size_t index = history.size();
    for (std::size_t k = 0; k < history.size(); ++k)
        if (history.records[k].date == date) index = k;
    if (index == history.size())
        throw DataError("date " + date_text + " not present in " + file);
    if (index < 2)
        throw DataError("insufficient history before " + date_text +
                        " (need 2 prior trading days)");

    const Forecast fc = make_forecast(window_at(history, index), rc.tau, rc.solver());
    const Decision d =
        fc.abstain() ? Decision{DecisionKind::NoTrade, 1} : decide(fc, rc.strategy());
    print_forecast(fc, d);
    return kExitOk;
}

int run_backtest_cmd(const RunConfig& rc, const std::vector<std::string>& files) {
    std::vector<BacktestReport> reports;
    for (const auto& file : files) {
        try {
            const OptionHistory history = load_history(file);
            reports.push_back(run_backtest(history, rc.tau, rc.solver(), rc.strategy()));
        } catch (const std::exception& e) {
            std::cerr << "skipping " << file << ": " << e.what() << "\n";
        }
    }
    if (reports.empty()) throw DataError("no usable history files");

    std::printf("%-24s %6s %7s %12s %16s\n", "option_id", "days", "trades", "total_pnl",
                "mean_rel_error");
    double total = 0;
    for (const auto& r : reports) {
        std::printf("%-24s %6d %7zu %12.6f %16.6f\n", r.option_id.c_str(),
                    r.days_evaluated, r.trades.size(), r.total_pnl, r.mean_rel_error);
        total += r.total_pnl;
    }
    std::printf("%-24s %6s %7s %12.6f\n", "TOTAL", "", "", total);

    if (!rc.out.empty()) {
        std::ofstream out(rc.out, std::ios::binary);
        if (!out) throw DataError("cannot write '" + rc.out + "'");
        write_backtest_csv(out, reports);
        std::printf("report written to %s\n", rc.out.c_str());
    }
    return kExitOk;
}

ForecastInputs default_synthetic_inputs(double tau) {
    ForecastInputs in;
    in.tau = tau;
    in.ub_poly = fit_quadratic(1.030, 1.042, 1.050, tau);
    in.ua_poly = fit_quadratic(1.090, 1.100, 1.112, tau);
    in.sigma_poly = fit_quadratic(0.2, 0.2, 0.2, tau);
    in.s_b = 99.0;
    in.s_a = 101.0;
    return in;
}

int run_synth(const RunConfig& rc) {
    SyntheticConfig syn;
    syn.solver = rc.solver();
    syn.beta = rc.beta;
    syn.seed = rc.seed;
    syn.terminal_bump = rc.bump;
    const ForecastInputs in = default_synthetic_inputs(rc.tau);

    std::vector<double> deltas;
    if (rc.noise_delta < 0.0)
        deltas = {1e-2, 1e-3, 1e-4};
    else if (rc.noise_delta > 0.0)
        deltas = {rc.noise_delta};
    const auto rows = synthetic_sweep(in, syn, deltas);

    std::printf("%10s %12s %14s %14s %14s\n", "delta", "alpha", "err(Q_tau)", "err(Q_2tau)",
                "err(t=2tau)");
    std::ostringstream csv;
    csv << "delta,alpha,err_q_tau,err_q_2tau,err_top_row\n";
    for (const auto& r : rows) {
        std::printf("%10.1e %12.6e %14.6e %14.6e %14.6e\n", r.delta, r.alpha, r.err_q_tau,
                    r.err_q_2tau, r.err_top_row);
        char line[160];
        std::snprintf(line, sizeof(line), "%.6e,%.6e,%.6e,%.6e,%.6e\n", r.delta, r.alpha,
                      r.err_q_tau, r.err_q_2tau, r.err_top_row);
        csv << line;
    }
    if (!rc.synth_out.empty()) {
        std::ofstream out(rc.synth_out, std::ios::binary);
        if (!out) throw DataError("cannot write '" + rc.synth_out + "'");
        out << csv.str();
    }
    return kExitOk;
}

int run_demo(int n_max, std::vector<double> times) {
    std::vector<double> coeffs(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) coeffs[n - 1] = 1.0 / n;
    const double at_zero = reversed_heat_norm(coeffs, 0.0);
    std::printf("reversed-heat series with f_n = 1/n, n <= %d\n", n_max);
    std::printf("%8s %18s %14s\n", "t", "||u(.,t)||^2", "growth");
    for (double t : times) {
        const double norm = reversed_heat_norm(coeffs, t);
        std::printf("%8.3f %18.6e %14.6e\n", t, norm, norm / at_zero);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optcast: forecast short-horizon option prices by solving the "
                 "Black-Scholes equation forward in time as a regularized "
                 "least-squares problem, and backtest the resulting strategy"};
    app.require_subcommand(1);
    RunConfig rc;

    auto* fc_cmd = app.add_subcommand("forecast", "Forecast one option for one day");
    std::string fc_file, fc_date;
    fc_cmd->add_option("--file", fc_file, "Option history CSV")->required();
    fc_cmd->add_option("--date", fc_date, "Forecast day (YYYY-MM-DD), needs 2 prior days")
        ->required();
    fc_cmd->add_option("--cutoff", rc.cutoff, "Buy margin over the extrapolated ask")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1e9));
    add_solver_flags(fc_cmd, rc);

    auto* bt_cmd = app.add_subcommand("backtest", "Backtest one or more option histories");
    std::vector<std::string> bt_files;
    bt_cmd->add_option("files", bt_files, "Option history CSV files")->required();
    bt_cmd->add_option("--cutoff", rc.cutoff, "Buy margin over the extrapolated ask")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1e9));
    bt_cmd->add_option("--out", rc.out, "Write the per-option CSV report here")
        ->capture_default_str();
    add_solver_flags(bt_cmd, rc);

    auto* sy_cmd = app.add_subcommand("synth", "Synthetic-data validation sweep");
    sy_cmd->add_option("--noise-delta", rc.noise_delta,
                       "Relative noise level (default: sweep 1e-2, 1e-3, 1e-4; 0 = "
                       "noiseless row only)")
        ->check(CLI::Range(0.0, 0.999999));
    sy_cmd->add_option("--beta", rc.beta, "Exponent in alpha = delta^(2 beta)")
        ->capture_default_str()
        ->check(CLI::Range(1e-9, 0.999999));
    sy_cmd->add_option("--seed", rc.seed, "Noise seed")->capture_default_str();
    sy_cmd->add_option("--bump", rc.bump, "Terminal-profile bump amplitude (dollars)")
        ->capture_default_str();
    sy_cmd->add_option("--out", rc.synth_out, "Write the error table as CSV here");
    add_solver_flags(sy_cmd, rc);

    auto* demo_cmd =
        app.add_subcommand("demo-illposed", "Show reversed-heat norm blow-up");
    int n_max = 5;
    std::vector<double> times{0.0, 0.1, 0.25, 0.5};
    demo_cmd->add_option("--n-max", n_max, "Number of Fourier modes")
        ->capture_default_str()
        ->check(CLI::Range(1, 10000));
    demo_cmd->add_option("--t", times, "Times to evaluate")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(fc_cmd)) return run_forecast(rc, fc_file, fc_date);
        if (app.got_subcommand(bt_cmd)) return run_backtest_cmd(rc, bt_files);
        if (app.got_subcommand(sy_cmd)) return run_synth(rc);
        if (app.got_subcommand(demo_cmd)) return run_demo(n_max, times);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::out_of_range& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitUsage;
}
