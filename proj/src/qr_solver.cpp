#include "optcast/qr_solver.hpp"

#include <cmath>
#include <numbers>

namespace optcast {

namespace {

void validate_node_counts(int n_s, int n_t) {
    if (n_s < 5 || n_t < 5 || n_s % 2 == 0 || n_t % 2 == 0)
        throw SolverError("grid node counts must be odd and >= 5 (got n_s=" +
                          std::to_string(n_s) + ", n_t=" + std::to_string(n_t) + ")");
}

// sigma(t_j)^2 / 2 per time node, with the volatility floor applied.
std::vector<double> diffusion_samples(const QuadPoly& sigma_poly, const Grid& grid) {
    std::vector<double> c(grid.n_t);
    for (int j = 0; j < grid.n_t; ++j) {
        const double sig = std::max(sigma_poly(grid.t(j)), kSigmaFloor);
        c[j] = 0.5 * sig * sig;
    }
    return c;
}

inline double residual_at(const GridField& u, const Grid& g, std::span<const double> c,
                          int i, int j) {
    const double si = g.s(i);
    const double k = c[j] * si * si / (g.ds * g.ds);
    return (u(i, j + 1) - u(i, j)) / g.dt +
           k * (u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j));
}

// Squared-residual part of the functional and (optionally) its gradient.
void residual_terms(const GridField& u, const Grid& g, std::span<const double> c,
                    double* J, GridField* grad) {
    const double cell = g.ds * g.dt;
    for (int j = 0; j <= g.n_t - 2; ++j) {
        for (int i = 1; i <= g.n_s - 2; ++i) {
            const double r = residual_at(u, g, c, i, j);
            if (J) *J += r * r * cell;
            if (grad) {
                const double si = g.s(i);
                const double k = c[j] * si * si / (g.ds * g.ds);
                const double t2 = 2.0 * r * cell;
                (*grad)(i, j + 1) += t2 / g.dt;
                (*grad)(i, j) += t2 * (-1.0 / g.dt - 2.0 * k);
                (*grad)(i + 1, j) += t2 * k;
                (*grad)(i - 1, j) += t2 * k;
            }
        }
    }
}

// Discrete squared H^2 norm terms of w = u - F (F == nullptr means w = u),
// scaled by `weight`, accumulated into J and (optionally) the gradient.
// Difference quotients are taken with respect to the coordinates rescaled
// onto the unit square. On the fixed rectangle this is an equivalent H^2
// norm, and it keeps the quadratic form well conditioned: in raw dollar and
// year units dt^-4 reaches 1e13 and conjugate gradient stalls far from the
// minimizer.
void h2_terms(const GridField& u, const GridField* F, const Grid& g, double weight,
              double* J, GridField* grad) {
    const int ns = g.n_s, nt = g.n_t;
    const double hs = 1.0 / (ns - 1);  // normalized spacings
    const double ht = 1.0 / (nt - 1);
    const double cell = hs * ht;
    const double wc = weight * cell;
    auto w = [&](int i, int j) { return F ? u(i, j) - (*F)(i, j) : u(i, j); };

    // function values, all nodes
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < ns; ++i) {
            const double d = w(i, j);
            if (J) *J += wc * d * d;
            if (grad) (*grad)(i, j) += 2.0 * wc * d;
        }

    // forward first difference in s
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i <= ns - 2; ++i) {
            const double q = (w(i + 1, j) - w(i, j)) / hs;
            if (J) *J += wc * q * q;
            if (grad) {
                const double t2 = 2.0 * wc * q / hs;
                (*grad)(i + 1, j) += t2;
                (*grad)(i, j) -= t2;
            }
        }

    // forward first difference in t
    for (int j = 0; j <= nt - 2; ++j)
        for (int i = 0; i < ns; ++i) {
            const double q = (w(i, j + 1) - w(i, j)) / ht;
            if (J) *J += wc * q * q;
            if (grad) {
                const double t2 = 2.0 * wc * q / ht;
                (*grad)(i, j + 1) += t2;
                (*grad)(i, j) -= t2;
            }
        }

    // central second difference in s, interior i
    const double hs2 = hs * hs;
    for (int j = 0; j < nt; ++j)
        for (int i = 1; i <= ns - 2; ++i) {
            const double q = (w(i + 1, j) - 2.0 * w(i, j) + w(i - 1, j)) / hs2;
            if (J) *J += wc * q * q;
            if (grad) {
                const double t2 = 2.0 * wc * q / hs2;
                (*grad)(i + 1, j) += t2;
                (*grad)(i, j) -= 2.0 * t2;
                (*grad)(i - 1, j) += t2;
            }
        }

    // central second difference in t, interior j
    const double ht2 = ht * ht;
    for (int j = 1; j <= nt - 2; ++j)
        for (int i = 0; i < ns; ++i) {
            const double q = (w(i, j + 1) - 2.0 * w(i, j) + w(i, j - 1)) / ht2;
            if (J) *J += wc * q * q;
            if (grad) {
                const double t2 = 2.0 * wc * q / ht2;
                (*grad)(i, j + 1) += t2;
                (*grad)(i, j) -= 2.0 * t2;
                (*grad)(i, j - 1) += t2;
            }
        }

    // forward-forward mixed difference
    const double hst = hs * ht;
    for (int j = 0; j <= nt - 2; ++j)
        for (int i = 0; i <= ns - 2; ++i) {
            const double q =
                (w(i + 1, j + 1) - w(i + 1, j) - w(i, j + 1) + w(i, j)) / hst;
            if (J) *J += wc * q * q;
            if (grad) {
                const double t2 = 2.0 * wc * q / hst;
                (*grad)(i + 1, j + 1) += t2;
                (*grad)(i + 1, j) -= t2;
                (*grad)(i, j + 1) -= t2;
                (*grad)(i, j) += t2;
            }
        }
}

void zero_constrained(GridField& g) {
    for (int i = 0; i < g.n_s(); ++i) g(i, 0) = 0.0;
    for (int j = 0; j < g.n_t(); ++j) {
        g(0, j) = 0.0;
        g(g.n_s() - 1, j) = 0.0;
    }
}

// Free unknowns are the nodes with i in [1, n_s-2] and j in [1, n_t-1]:
// everything except the initial row and the two boundary columns.
struct FreeDofs {
    int ns, nt;
    int count() const { return (ns - 2) * (nt - 1); }

    void pack(const GridField& f, std::vector<double>& x) const {
        x.resize(count());
        int k = 0;
        for (int j = 1; j < nt; ++j)
            for (int i = 1; i <= ns - 2; ++i) x[k++] = f(i, j);
    }
    void unpack(std::span<const double> x, GridField& f) const {
        int k = 0;
        for (int j = 1; j < nt; ++j)
            for (int i = 1; i <= ns - 2; ++i) f(i, j) = x[k++];
    }
};

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

}  // namespace

Grid build_grid(const ForecastInputs& inputs, const SolverConfig& config) {
    validate_node_counts(config.n_s, config.n_t);
    if (!(inputs.s_b < inputs.s_a))
        throw SolverError("stock interval is empty (s_b >= s_a)");
    if (!(inputs.tau > 0.0 && inputs.tau < 0.25))
        throw SolverError("tau must lie in (0, 1/4)");
    Grid g;
    g.n_s = config.n_s;
    g.n_t = config.n_t;
    g.s_b = inputs.s_b;
    g.s_a = inputs.s_a;
    g.tau = inputs.tau;
    g.ds = (inputs.s_a - inputs.s_b) / (config.n_s - 1);
    g.dt = 2.0 * inputs.tau / (config.n_t - 1);
    return g;
}

GridField apply_L(const GridField& u, const Grid& grid, const QuadPoly& sigma_poly) {
    if (u.n_s() != grid.n_s || u.n_t() != grid.n_t)
        throw SolverError("apply_L: field shape does not match grid");
    const auto c = diffusion_samples(sigma_poly, grid);
    GridField r(grid.n_s, grid.n_t);
    for (int j = 0; j <= grid.n_t - 2; ++j)
        for (int i = 1; i <= grid.n_s - 2; ++i) r(i, j) = residual_at(u, grid, c, i, j);
    return r;
}

double h2_norm_sq(const GridField& w, const Grid& grid) {
    double J = 0;
    h2_terms(w, nullptr, grid, 1.0, &J, nullptr);
    return J;
}

double functional(const GridField& u, const GridField& reference, const Grid& grid,
                  const QuadPoly& sigma_poly, double alpha) {
    if (u.n_s() != grid.n_s || u.n_t() != grid.n_t || reference.n_s() != grid.n_s ||
        reference.n_t() != grid.n_t)
        throw SolverError("functional: field shape does not match grid");
    const auto c = diffusion_samples(sigma_poly, grid);
    double J = 0;
    residual_terms(u, grid, c, &J, nullptr);
    h2_terms(u, &reference, grid, alpha, &J, nullptr);
    return J;
}

GridField gradient(const GridField& u, const GridField& reference, const Grid& grid,
                   const QuadPoly& sigma_poly, double alpha) {
    if (u.n_s() != grid.n_s || u.n_t() != grid.n_t || reference.n_s() != grid.n_s ||
        reference.n_t() != grid.n_t)
        throw SolverError("gradient: field shape does not match grid");
    const auto c = diffusion_samples(sigma_poly, grid);
    GridField g(grid.n_s, grid.n_t);
    residual_terms(u, grid, c, nullptr, &g);
    h2_terms(u, &reference, grid, alpha, nullptr, &g);
    zero_constrained(g);
    return g;
}

GridField sample_reference(const ForecastInputs& inputs, const Grid& grid) {
    GridField F(grid.n_s, grid.n_t);
    for (int j = 0; j < grid.n_t; ++j)
        for (int i = 0; i < grid.n_s; ++i)
            F(i, j) = reference_function(inputs, grid.s(i), grid.t(j));
    return F;
}

std::vector<double> sample_initial(const ForecastInputs& inputs, const Grid& grid) {
    std::vector<double> f(grid.n_s);
    for (int i = 0; i < grid.n_s; ++i) f[i] = initial_condition(inputs, grid.s(i));
    return f;
}

std::vector<double> sample_boundary(const QuadPoly& quote_poly, const Grid& grid) {
    std::vector<double> b(grid.n_t);
    for (int j = 0; j < grid.n_t; ++j) b[j] = quote_poly(grid.t(j));
    return b;
}

MinimizeResult minimize_on_grid(const Grid& grid, const QuadPoly& sigma_poly,
                                const GridField& reference,
                                std::span<const double> initial_row,
                                std::span<const double> left_boundary,
                                std::span<const double> right_boundary,
                                const SolverConfig& config, const GridField* start) {
    validate_node_counts(grid.n_s, grid.n_t);
    if (!(config.alpha > 0.0 && config.alpha < 1.0))
        throw SolverError("alpha must lie in (0, 1)");
    if (!(config.cg_rel_tol > 0.0)) throw SolverError("cg_rel_tol must be positive");
    if (initial_row.size() != static_cast<std::size_t>(grid.n_s) ||
        left_boundary.size() != static_cast<std::size_t>(grid.n_t) ||
        right_boundary.size() != static_cast<std::size_t>(grid.n_t))
        throw SolverError("constraint data does not match the grid");
    if (start && (start->n_s() != grid.n_s || start->n_t() != grid.n_t))
        throw SolverError("start field does not match the grid");

    const auto c = diffusion_samples(sigma_poly, grid);
    const FreeDofs dofs{grid.n_s, grid.n_t};
    const int n_free = dofs.count();
    const int cap = config.cg_max_iters > 0 ? config.cg_max_iters : 10 * n_free;

    // Current iterate: constrained nodes fixed once, never written again.
    GridField u(grid.n_s, grid.n_t);
    if (start) u = *start;
    auto impose_constraints = [&](GridField& f) {
        for (int i = 0; i < grid.n_s; ++i) f(i, 0) = initial_row[i];
        for (int j = 0; j < grid.n_t; ++j) {
            f(0, j) = left_boundary[j];
            f(grid.n_s - 1, j) = right_boundary[j];
        }
    };
    impose_constraints(u);

    // Admissible comparator for the optimality certificate.
    GridField comparator = reference;
    impose_constraints(comparator);
    double j_ref = 0;
    residual_terms(comparator, grid, c, &j_ref, nullptr);
    h2_terms(comparator, &reference, grid, config.alpha, &j_ref, nullptr);

    auto grad_at = [&](const GridField& field) {
        GridField g(grid.n_s, grid.n_t);
        residual_terms(field, grid, c, nullptr, &g);
        h2_terms(field, &reference, grid, config.alpha, nullptr, &g);
        zero_constrained(g);
        return g;
    };
    // H*d for a direction d living on the free nodes: the same quadratic
    // form with zero constraint data and zero reference.
    GridField dir_field(grid.n_s, grid.n_t);
    auto hessian_apply = [&](std::span<const double> p, std::vector<double>& out) {
        dofs.unpack(p, dir_field);
        GridField g(grid.n_s, grid.n_t);
        residual_terms(dir_field, grid, c, nullptr, &g);
        h2_terms(dir_field, nullptr, grid, config.alpha, nullptr, &g);
        zero_constrained(g);
        dofs.pack(g, out);
    };

    std::vector<double> x, r, p, hp;
    dofs.pack(u, x);
    dofs.pack(grad_at(u), r);
    for (auto& v : r) v = -v;
    p = r;
    double rr = dot(r, r);
    const double rr0 = rr;
    const double stop = config.cg_rel_tol * config.cg_rel_tol * rr0;

    SolveStats stats;
    stats.initial_gradient_norm = std::sqrt(rr0);

    int iter = 0;
    while (rr > stop && iter < cap) {
        hessian_apply(p, hp);
        const double php = dot(p, hp);
        if (!std::isfinite(php))
            throw SolverError("conjugate gradient produced a non-finite value");
        if (php <= 0.0) break;  // rounding exhausted the quadratic model
        const double step = rr / php;
        for (int k = 0; k < n_free; ++k) x[k] += step * p[k];
        ++iter;
        for (int k = 0; k < n_free; ++k) r[k] -= step * hp[k];
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        for (int k = 0; k < n_free; ++k) p[k] = r[k] + beta * p[k];
        rr = rr_new;
        if (!std::isfinite(rr))
            throw SolverError("conjugate gradient produced a non-finite gradient");
    }

    dofs.unpack(x, u);
    stats.iterations = iter;
    stats.final_gradient_norm = std::sqrt(rr);
    stats.hit_iteration_cap = rr > stop;

    double J = 0;
    residual_terms(u, grid, c, &J, nullptr);
    h2_terms(u, &reference, grid, config.alpha, &J, nullptr);
    if (!std::isfinite(J)) throw SolverError("functional value is not finite");
    stats.functional_value = J;
    stats.reference_functional = j_ref;
    stats.converged = !stats.hit_iteration_cap && J <= j_ref + 1e-6 * (1.0 + j_ref);

    return MinimizeResult{std::move(u), stats};
}

MinimizeResult minimize(const ForecastInputs& inputs, const SolverConfig& config) {
    const Grid grid = build_grid(inputs, config);
    const GridField F = sample_reference(inputs, grid);
    const auto f_row = sample_initial(inputs, grid);
    const auto ub_col = sample_boundary(inputs.ub_poly, grid);
    const auto ua_col = sample_boundary(inputs.ua_poly, grid);
    return minimize_on_grid(grid, inputs.sigma_poly, F, f_row, ub_col, ua_col, config);
}

GridField solve_wellposed_downward(std::span<const double> terminal,
                                   const ForecastInputs& inputs, const Grid& grid) {
    if (terminal.size() != static_cast<std::size_t>(grid.n_s))
        throw SolverError("terminal profile does not match the grid");
    const int ns = grid.n_s;
    GridField u(ns, grid.n_t);
    for (int i = 0; i < ns; ++i) u(i, grid.n_t - 1) = terminal[i];

    const int m = ns - 2;  // interior unknowns per row
    std::vector<double> lower(m), diag(m), upper(m), rhs(m);

    for (int j = grid.n_t - 2; j >= 0; --j) {
        const double tj = grid.t(j);
        const double ub = inputs.ub_poly(tj);
        const double ua = inputs.ua_poly(tj);
        u(0, j) = ub;
        u(ns - 1, j) = ua;

        const double sig = std::max(inputs.sigma_poly(tj), kSigmaFloor);
        const double cdiff = 0.5 * sig * sig;
        for (int i = 1; i <= ns - 2; ++i) {
            const double si = grid.s(i);
            const double mu = grid.dt * cdiff * si * si / (grid.ds * grid.ds);
            lower[i - 1] = -mu;
            diag[i - 1] = 1.0 + 2.0 * mu;
            upper[i - 1] = -mu;
            rhs[i - 1] = u(i, j + 1);
            if (i == 1) rhs[i - 1] += mu * ub;
            if (i == ns - 2) rhs[i - 1] += mu * ua;
        }

        // Thomas elimination; the matrix is strictly diagonally dominant.
        for (int k = 1; k < m; ++k) {
            const double pivot = diag[k - 1];
            if (!(std::abs(pivot) > 1e-300))
                throw SolverError("tridiagonal solve failed (degenerate pivot)");
            const double factor = lower[k] / pivot;
            diag[k] -= factor * upper[k - 1];
            rhs[k] -= factor * rhs[k - 1];
        }
        u(m, j) = rhs[m - 1] / diag[m - 1];
        for (int k = m - 2; k >= 0; --k)
            u(k + 1, j) = (rhs[k] - upper[k] * u(k + 2, j)) / diag[k];
    }
    return u;
}

double reversed_heat_norm(std::span<const double> fourier_coeffs, double t) {
    double sum = 0;
    for (std::size_t n = 1; n <= fourier_coeffs.size(); ++n) {
        const double f = fourier_coeffs[n - 1];
        sum += f * f * std::exp(2.0 * static_cast<double>(n) * static_cast<double>(n) * t);
    }
    return 0.5 * std::numbers::pi * sum;
}

}  // namespace optcast
