#include "optcast/interp.hpp"

#include <algorithm>
#include <stdexcept>

namespace optcast {

namespace {

// Linear interpolation through (s_b, vb) and (s_a, va). The two-weight form
// reproduces the endpoints bit-for-bit: at s = s_b the weights are exactly
// (1, 0), at s = s_a exactly (0, 1).
double linear_between(double s, double s_b, double s_a, double vb, double va) {
    const double wb = (s - s_a) / (s_b - s_a);
    const double wa = (s - s_b) / (s_a - s_b);
    return vb * wb + va * wa;
}

}  // namespace

QuadPoly fit_quadratic(double v_m2, double v_m1, double v_0, double tau) {
    if (!(tau > 0)) throw std::invalid_argument("fit_quadratic: tau must be positive");
    const double d0 = v_0 - v_m1;
    const double d2 = v_m2 - v_m1;
    QuadPoly p;
    p.a = (d0 + d2) / (2.0 * tau * tau);
    p.b = (3.0 * d0 + d2) / (2.0 * tau);
    p.c = v_0;
    return p;
}

double sigma_at(const ForecastInputs& inputs, double t) {
    return std::max(inputs.sigma_poly(t), kSigmaFloor);
}

bool sigma_needs_clamp(const ForecastInputs& inputs) {
    const QuadPoly& p = inputs.sigma_poly;
    double lo = std::min(p(0.0), p(2.0 * inputs.tau));
    if (p.a != 0.0) {
        const double vertex = -p.b / (2.0 * p.a);
        if (vertex > 0.0 && vertex < 2.0 * inputs.tau) lo = std::min(lo, p(vertex));
    }
    return lo < kSigmaFloor;
}

bool quotes_crossed(const ForecastInputs& inputs) {
    for (double t : {inputs.tau, 2.0 * inputs.tau}) {
        if (!(inputs.ua_poly(t) > inputs.ub_poly(t))) return true;
    }
    return false;
}

double initial_condition(const ForecastInputs& inputs, double s) {
    return linear_between(s, inputs.s_b, inputs.s_a, inputs.ub_poly(0.0), inputs.ua_poly(0.0));
}

double reference_function(const ForecastInputs& inputs, double s, double t) {
    return linear_between(s, inputs.s_b, inputs.s_a, inputs.ub_poly(t), inputs.ua_poly(t));
}

}  // namespace optcast
