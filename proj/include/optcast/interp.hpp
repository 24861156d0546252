#pragma once

#include "optcast/market_data.hpp"

namespace optcast {

/// p(t) = a*t^2 + b*t + c with t in years. The exact quadratic through
/// three equally spaced trailing observations.
struct QuadPoly {
    double a = 0;
    double b = 0;
    double c = 0;

    double operator()(double t) const { return (a * t + b) * t + c; }
};

/// Fit the unique quadratic through (-2*tau, v_m2), (-tau, v_m1), (0, v_0).
/// Built from value differences so constant data yields a = b = 0 exactly.
QuadPoly fit_quadratic(double v_m2, double v_m1, double v_0, double tau);

/// Evaluate p(t). The model claims validity only for t in [-2*tau, 2*tau];
/// staying inside that range is the caller's contract.
inline double extrapolate(const QuadPoly& p, double t) { return p(t); }

/// Everything one forecast needs: extrapolated option bid/ask and
/// volatility, today's stock bid/ask, and the time unit tau (years).
struct ForecastInputs {
    QuadPoly ub_poly;     // option bid, dollars
    QuadPoly ua_poly;     // option ask, dollars
    QuadPoly sigma_poly;  // implied volatility, per sqrt-year
    double s_b = 0;       // stock bid at t = 0
    double s_a = 0;       // stock ask at t = 0
    double tau = 0;       // years per forecast step
};

/// Volatility floor: the PDE coefficient must stay strictly positive.
inline constexpr double kSigmaFloor = 1e-4;

/// sigma_poly evaluated at t and clamped below at kSigmaFloor.
double sigma_at(const ForecastInputs& inputs, double t);

/// True when the extrapolated volatility dips below the floor anywhere on
/// [0, 2*tau], i.e. the clamp will engage during the solve.
bool sigma_needs_clamp(const ForecastInputs& inputs);

/// True when the extrapolated ask fails to stay strictly above the
/// extrapolated bid at t = tau or t = 2*tau. Such days are abstained from.
bool quotes_crossed(const ForecastInputs& inputs);

/// f(s): linear interpolation between (s_b, u_b(0)) and (s_a, u_a(0)).
double initial_condition(const ForecastInputs& inputs, double s);

/// F(s, t): linear in s between the extrapolated quotes at time t.
/// F(s, 0) = f(s), F(s_b, t) = u_b(t), F(s_a, t) = u_a(t).
double reference_function(const ForecastInputs& inputs, double s, double t);

}  // namespace optcast
