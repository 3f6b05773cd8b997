#include "oscilla/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "oscilla/error.hpp"
#include "oscilla/parallel.hpp"
#include "oscilla/thresholds.hpp"

namespace oscilla {

TruncatedNonlinearity::TruncatedNonlinearity(const Nonlinearity& base, double alpha_n, std::size_t table_nodes,
                                             double tol_quad)
    : base_(base), alpha_(alpha_n) {
    if (!(alpha_n > 0.0)) throw Error(ErrorCode::DomainError, "truncation level must be positive");
    if (table_nodes < 2) throw Error(ErrorCode::DomainError, "primitive table needs at least two nodes");
    f0_ = base_(0.0);
    step_ = alpha_ / static_cast<double>(table_nodes - 1);
    PrimitiveCalculus pc(base_, 2.0, 1.0, tol_quad);
    F_.resize(table_nodes);
    f_.resize(table_nodes);
    for (std::size_t i = 0; i < table_nodes; ++i) {
        const double s = i + 1 == table_nodes ? alpha_ : step_ * static_cast<double>(i);
        F_[i] = pc.F(s);
        f_[i] = base_(s);
        max_abs_f_ = std::max(max_abs_f_, std::abs(f_[i]));
    }
}

double TruncatedNonlinearity::f(double s) const {
    if (s < 0.0) return f0_;
    return s <= alpha_ ? base_(s) : 0.0;
}

namespace {

struct Seg {
    std::size_t i;
    double t;
};

Seg locate(double s, double step, std::size_t n) {
    const double x = s / step;
    std::size_t i = static_cast<std::size_t>(x);
    if (i + 1 >= n) i = n - 2;
    return {i, x - static_cast<double>(i)};
}

}  // namespace

double TruncatedNonlinearity::F(double s) const {
    if (s < 0.0) return f0_ * s;
    if (s >= alpha_) return F_.back();
    const auto [i, t] = locate(s, step_, F_.size());
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * F_[i] + (t3 - 2 * t2 + t) * step_ * f_[i] + (-2 * t3 + 3 * t2) * F_[i + 1] +
           (t3 - t2) * step_ * f_[i + 1];
}

double TruncatedNonlinearity::dF(double s) const {
    if (s < 0.0) return f0_;
    if (s >= alpha_) return 0.0;
    const auto [i, t] = locate(s, step_, F_.size());
    const double t2 = t * t;
    return (6 * t2 - 6 * t) * (F_[i] - F_[i + 1]) / step_ + (3 * t2 - 4 * t + 1) * f_[i] + (3 * t2 - 2 * t) * f_[i + 1];
}

double TruncatedNonlinearity::d2F(double s) const {
    if (s < 0.0 || s >= alpha_) return 0.0;
    const auto [i, t] = locate(s, step_, F_.size());
    return (12 * t - 6) * (F_[i] - F_[i + 1]) / (step_ * step_) + ((6 * t - 4) * f_[i] + (6 * t - 2) * f_[i + 1]) / step_;
}

RadialGrid RadialGrid::uniform(double R, std::size_t cells) { return graded(R, cells, 1.0); }

RadialGrid RadialGrid::graded(double R, std::size_t cells, double grading) {
    if (!(R > 0.0) || cells < 1 || !(grading >= 1.0)) {
        throw Error(ErrorCode::DomainError, "radial grid needs R > 0, cells >= 1, grading >= 1");
    }
    RadialGrid g;
    g.r.resize(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(cells);
        g.r[j] = grading == 1.0 ? R * t : R * (1.0 - std::pow(1.0 - t, grading));
    }
    g.r.front() = 0.0;
    g.r.back() = R;
    return g;
}

double RadialGrid::max_step() const {
    double h = 0.0;
    for (std::size_t j = 0; j + 1 < r.size(); ++j) h = std::max(h, r[j + 1] - r[j]);
    return h;
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

Potential Potential::p_laplacian(double p) {
    return weighted(p, [](double) { return 1.0; }, 1.0, 1.0);
}

Potential Potential::weighted(double p, std::function<double(double)> a, double alpha, double beta) {
    if (!(p > 1.0)) throw Error(ErrorCode::DomainError, "potential needs p > 1");
    if (!(alpha > 0.0) || !(beta >= alpha)) throw Error(ErrorCode::DomainError, "potential needs 0 < alpha <= beta");
    Potential pot;
    pot.p = p;
    pot.alpha = alpha;
    pot.beta = beta;
    pot.name = alpha == 1.0 && beta == 1.0 ? "p_laplacian" : "weighted";
    pot.phi = [a, p](double r, double xi) { return a(r) * std::pow(std::abs(xi), p) / p; };
    pot.dphi = [a, p](double r, double xi) {
        const double m = std::abs(xi);
        return p == 2.0 ? a(r) * xi : a(r) * (xi < 0.0 ? -1.0 : 1.0) * std::pow(m, p - 1.0);
    };
    pot.d2phi = [a, p](double r, double xi) {
        return p == 2.0 ? a(r) : a(r) * (p - 1.0) * std::pow(std::abs(xi), p - 2.0);
    };
    return pot;
}

PotentialCheck check_potential(const Potential& pot, double R, std::size_t samples) {
    PotentialCheck chk;
    const double p = pot.p;
    for (std::size_t i = 0; i < samples; ++i) {
        const double r = R * (static_cast<double>(i) + 0.5) / static_cast<double>(samples);
        if (pot.phi(r, 0.0) != 0.0) chk.zero_ok = false;
        for (std::size_t k = 0; k < samples; ++k) {
            const double xi = std::pow(10.0, -3.0 + 6.0 * static_cast<double>(k) / samples) * (k % 2 ? -1.0 : 1.0);
            const double ref = std::pow(std::abs(xi), p) / p;
            const double v = pot.phi(r, xi);
            const double slack = 1e-12 * ref;
            if (v < pot.alpha * ref - slack || v > pot.beta * ref + slack) chk.growth_ok = false;
            const double eta = -0.5 * xi + 0.1;
            const double mid = pot.phi(r, 0.5 * (xi + eta));
            if (!(mid < 0.5 * (v + pot.phi(r, eta)))) chk.convex_ok = false;
        }
    }
    return chk;
}

double sphere_measure(int N) { return N * unit_ball_volume(N); }

namespace {

void validate(const GridFunction& u) {
    if (u.grid.r.size() < 2 || u.u.size() != u.grid.r.size()) {
        throw Error(ErrorCode::DomainError, "grid function and grid sizes disagree");
    }
    if (u.N < 1) throw Error(ErrorCode::DomainError, "dimension must be >= 1");
}

// Cell measure (r_{j+1}^N - r_j^N)/N.
std::vector<double> cell_weights(const RadialGrid& g, int N) {
    std::vector<double> w(g.cells());
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = (std::pow(g.r[j + 1], N) - std::pow(g.r[j], N)) / N;
    }
    return w;
}

double radial_sum(const GridFunction& u, const std::vector<double>& w, const TruncatedNonlinearity& tn,
                  const Potential& pot, double lambda) {
    double e = 0.0;
    const auto& r = u.grid.r;
    for (std::size_t j = 0; j + 1 < r.size(); ++j) {
        const double h = r[j + 1] - r[j];
        const double rm = 0.5 * (r[j] + r[j + 1]);
        const double D = (u.u[j + 1] - u.u[j]) / h;
        const double um = 0.5 * (u.u[j] + u.u[j + 1]);
        e += (pot.phi(rm, D) - lambda * tn.F(um)) * w[j];
    }
    return e;
}

void gradient_into(const GridFunction& u, const std::vector<double>& w, const TruncatedNonlinearity& tn,
                   const Potential& pot, double lambda, double sphere, std::vector<double>& g) {
    const auto& r = u.grid.r;
    g.assign(r.size(), 0.0);
    for (std::size_t j = 0; j + 1 < r.size(); ++j) {
        const double h = r[j + 1] - r[j];
        const double rm = 0.5 * (r[j] + r[j + 1]);
        const double D = (u.u[j + 1] - u.u[j]) / h;
        const double um = 0.5 * (u.u[j] + u.u[j + 1]);
        const double flux = pot.dphi(rm, D) * w[j] / h;
        const double src = 0.5 * lambda * tn.dF(um) * w[j];
        g[j] += -flux - src;
        g[j + 1] += flux - src;
    }
    for (double& v : g) v *= sphere;
}

}  // namespace

double radial_energy(const GridFunction& u, const TruncatedNonlinearity& tn, const Potential& pot, double lambda) {
    validate(u);
    return radial_sum(u, cell_weights(u.grid, u.N), tn, pot, lambda);
}

double assemble_energy(const GridFunction& u, const TruncatedNonlinearity& tn, const Potential& pot, double lambda) {
    return sphere_measure(u.N) * radial_energy(u, tn, pot, lambda);
}

std::vector<double> energy_gradient(const GridFunction& u, const TruncatedNonlinearity& tn, const Potential& pot,
                                    double lambda) {
    validate(u);
    std::vector<double> g;
    gradient_into(u, cell_weights(u.grid, u.N), tn, pot, lambda, sphere_measure(u.N), g);
    return g;
}

GridFunction comparison_function(double gamma, double delta, const RadialGrid& grid, int N, double p) {
    if (grid.r.size() < 2) throw Error(ErrorCode::DomainError, "comparison function needs a grid");
    const double R = grid.R();
    if (!(delta > 0.0 && delta < R)) throw Error(ErrorCode::DomainError, "comparison function needs 0 < delta < R");
    if (!(gamma > 0.0)) throw Error(ErrorCode::DomainError, "comparison function needs gamma > 0");
    GridFunction w{grid, std::vector<double>(grid.r.size()), N, p};
    for (std::size_t j = 0; j < grid.r.size(); ++j) w.u[j] = gamma * std::min(1.0, (R - grid.r[j]) / delta);
    w.u.back() = 0.0;
    return w;
}

NegativityResult negativity_test(const TruncatedNonlinearity& tn, const Potential& pot, double lambda, double gamma,
                                 double delta, const RadialGrid& grid, int N) {
    const GridFunction w = comparison_function(gamma, delta, grid, N, pot.p);
    NegativityResult out;
    out.energy = assemble_energy(w, tn, pot, lambda);
    out.negative = out.energy < 0.0;
    return out;
}

MinimizeResult minimize_from(const GridFunction& u0, const TruncatedNonlinearity& tn, const Potential& pot,
                             double lambda, const MinimizeOptions& opts) {
    validate(u0);
    if (!(lambda >= 0.0)) throw Error(ErrorCode::DomainError, "minimize needs lambda >= 0");
    const std::size_t n = u0.u.size();
    const std::size_t J = n - 1;
    const double hi = tn.alpha();
    const auto& r = u0.grid.r;
    const std::vector<double> w = cell_weights(u0.grid, u0.N);
    const double sphere = sphere_measure(u0.N);

    std::vector<double> mass(n, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
        mass[j] += 0.5 * sphere * w[j];
        mass[j + 1] += 0.5 * sphere * w[j];
    }

    MinimizeResult res;
    res.u = u0;
    auto& u = res.u.u;
    auto project = [hi, J](std::vector<double>& v) {
        for (std::size_t i = 0; i < J; ++i) v[i] = std::clamp(v[i], 0.0, hi);
        v[J] = 0.0;
    };
    project(u);

    const double scale = std::max(1.0, lambda * tn.max_abs_f());
    const double target = opts.tol_stat * scale;
    const double at_bound = 1e-12 * hi;
    // Regularisation of Phi'' near a vanishing slope (degenerate or singular for p != 2).
    const double eta = 1e-3 * hi / u0.grid.R();

    std::vector<double> g, d(n), a(n), b(n), cp(n), dp(n), trial(n);
    double E = radial_sum(res.u, w, tn, pot, lambda) * sphere;
    res.energy_history.push_back(E);

    auto masked_residual = [&]() {
        double m = 0.0;
        for (std::size_t i = 0; i < J; ++i) {
            double gi = g[i];
            if (u[i] <= at_bound) gi = std::min(gi, 0.0);
            if (u[i] >= hi - at_bound) gi = std::max(gi, 0.0);
            m = std::max(m, std::abs(gi) / mass[i]);
        }
        return m;
    };

    auto line_search = [&](const std::vector<double>& dir, double& E_new) {
        double t = 1.0;
        for (int k = 0; k < 60; ++k, t *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + t * dir[i];
            project(trial);
            double pred = 0.0;
            for (std::size_t i = 0; i < J; ++i) pred += g[i] * (trial[i] - u[i]);
            if (!(pred < 0.0)) continue;
            GridFunction tf{res.u.grid, trial, res.u.N, res.u.p};
            E_new = radial_sum(tf, w, tn, pot, lambda) * sphere;
            if (E_new < E && E_new <= E + 1e-4 * pred) return true;
        }
        return false;
    };

    std::size_t it = 0;
    int polish_left = 64;
    for (; it < opts.max_iter; ++it) {
        gradient_into(res.u, w, tn, pot, lambda, sphere, g);
        res.residual = masked_residual();
        if (res.residual <= target) {
            res.converged = true;
            break;
        }
        // Tridiagonal model Hessian: stiffness with regularised Phi'' plus the
        // source Hessian, assembled per cell. The exact source term is used when
        // the result is positive definite (Newton), only its convex part otherwise.
        std::vector<char> active(n, 0);
        bool newton = true;
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::fill(a.begin(), a.end(), 0.0);
            std::fill(b.begin(), b.end(), 0.0);
            for (std::size_t j = 0; j < J; ++j) {
                const double h = r[j + 1] - r[j];
                const double rm = 0.5 * (r[j] + r[j + 1]);
                const double D = (u[j + 1] - u[j]) / h;
                const double k = sphere * w[j] * pot.d2phi(rm, std::sqrt(D * D + eta * eta)) / (h * h);
                const double s2 = tn.d2F(0.5 * (u[j] + u[j + 1]));
                const double m = -0.25 * sphere * lambda * (newton ? s2 : std::min(s2, 0.0)) * w[j];
                a[j] += k + m;
                a[j + 1] += k + m;
                b[j] = m - k;
            }
            // Two-metric projection: near-active bounds get a diagonal step only.
            double width = 0.0;
            for (std::size_t i = 0; i < J; ++i) {
                const double scale_i = a[i] > 0.0 ? a[i] : mass[i];
                width = std::max(width, std::abs(std::clamp(u[i] - g[i] / scale_i, 0.0, hi) - u[i]));
            }
            const double eps_active = std::min(1e-3 * hi, width);
            for (std::size_t i = 0; i < J; ++i) {
                active[i] = (u[i] <= eps_active && g[i] > 0.0) || (u[i] >= hi - eps_active && g[i] < 0.0);
            }
            active[J] = 1;
            // Thomas solve of H d = -g on nodes 0..J-1 with couplings to active nodes cut.
            bool spd = true;
            for (std::size_t i = 0; i < J && spd; ++i) {
                const double lower = (i > 0 && !active[i] && !active[i - 1]) ? b[i - 1] : 0.0;
                const double upper = (i + 1 < J && !active[i] && !active[i + 1]) ? b[i] : 0.0;
                const double denom = a[i] - (i > 0 ? lower * cp[i - 1] : 0.0);
                if (!(denom > 0.0)) spd = false;
                cp[i] = upper / denom;
                dp[i] = (-g[i] - (i > 0 ? lower * dp[i - 1] : 0.0)) / denom;
            }
            if (spd) break;
            newton = false;
        }
        d[J] = 0.0;
        for (std::size_t i = J; i-- > 0;) d[i] = dp[i] - cp[i] * d[i + 1];

        double E_new = E;
        bool ok = line_search(d, E_new);
        if (!ok) {
            for (std::size_t i = 0; i < J; ++i) d[i] = -g[i] / a[i];
            ok = line_search(d, E_new);
        }
        if (!ok) {
            // Energy decrease is below rounding: accept the full model step while
            // it still reduces the stationarity residual.
            if (polish_left == 0) break;
            --polish_left;
            for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + d[i];
            project(trial);
            GridFunction tf{res.u.grid, trial, res.u.N, res.u.p};
            std::vector<double> g_saved = g;
            gradient_into(tf, w, tn, pot, lambda, sphere, g);
            std::swap(u, trial);
            const double trial_res = masked_residual();
            std::swap(u, trial);
            if (!(trial_res < res.residual)) {
                g = std::move(g_saved);
                break;
            }
            E_new = radial_sum(tf, w, tn, pot, lambda) * sphere;
            ++res.polish_steps;
        }
        u = trial;
        E = E_new;
        res.energy_history.push_back(E);
    }
    if (!res.converged) {
        gradient_into(res.u, w, tn, pot, lambda, sphere, g);
        res.residual = masked_residual();
        res.converged = res.residual <= target;
    }
    res.iterations = it;
    res.energy = E;
    res.active.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (u[i] <= at_bound) res.active[i] = -1;
        if (u[i] >= hi - at_bound) res.active[i] = 1;
    }
    return res;
}

MinimizeResult minimize(const TruncatedNonlinearity& tn, const Potential& pot, double lambda, const RadialGrid& grid,
                        int N, const MinimizeOptions& opts) {
    const double alpha = tn.alpha();
    const double R = grid.R();
    std::vector<GridFunction> starts;
    starts.push_back({grid, std::vector<double>(grid.r.size(), 0.0), N, pot.p});
    starts.push_back(comparison_function(alpha, R / 3.0, grid, N, pot.p));
    GridFunction half{grid, std::vector<double>(grid.r.size(), 0.5 * alpha), N, pot.p};
    half.u.back() = 0.0;
    starts.push_back(std::move(half));
    for (const GridFunction& e : opts.extra_starts) starts.push_back(e);

    std::vector<MinimizeResult> runs(starts.size());
    MinimizeOptions inner = opts;
    inner.extra_starts.clear();
    parallel_for(starts.size(), opts.threads,
                 [&](std::size_t i) { runs[i] = minimize_from(starts[i], tn, pot, lambda, inner); });
    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].energy < runs[best].energy) best = i;
    }
    MinimizeResult out = std::move(runs[best]);
    out.start_index = best;
    if (!out.converged && opts.throw_on_failure) {
        std::ostringstream os;
        os << "minimization stopped after " << out.iterations << " iterations with residual " << out.residual
           << " (energy " << out.energy << ", start " << best << ")";
        throw Error(ErrorCode::NonConvergence, os.str());
    }
    return out;
}

SequenceResult run_sequence(const Nonlinearity& f, const Potential& pot, double lambda, const ZeroSequence& zeros,
                            const RadialGrid& grid, int N, std::size_t K, const MinimizeOptions& opts,
                            std::span<const LambdaTerm> terms) {
    if (K > zeros.alphas.size()) throw Error(ErrorCode::DomainError, "run_sequence needs K zeros");
    SequenceResult out;
    out.items.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        SequenceItem& it = out.items[k];
        it.n = k + 1;
        it.alpha_n = zeros.alphas[k];
        const TruncatedNonlinearity tn(f, it.alpha_n);
        MinimizeOptions level = opts;
        if (k < terms.size() && terms[k].delta > 0.0 && terms[k].delta < grid.R()) {
            level.extra_starts.push_back(comparison_function(terms[k].gamma, terms[k].delta, grid, N, pot.p));
        }
        const MinimizeResult m = minimize(tn, pot, lambda, grid, N, level);
        it.sup_norm = m.u.sup_norm();
        it.energy = m.energy;
        it.residual = m.residual;
        it.converged = m.converged;
        it.trivial = it.sup_norm <= 1e-12 * it.alpha_n;
        it.interval_index = it.trivial ? 0 : zeros.interval_index(it.sup_norm);
        it.u = m.u;
    }
    out.all_trivial = std::all_of(out.items.begin(), out.items.end(), [](const SequenceItem& i) { return i.trivial; });
    out.trend_toward_limit = !out.all_trivial;
    for (std::size_t k = 1; k < K; ++k) {
        const double prev = out.items[k - 1].sup_norm, cur = out.items[k].sup_norm;
        if (zeros.direction == Direction::Infinity ? cur < prev : cur > prev) out.trend_toward_limit = false;
    }
    return out;
}

}  // namespace oscilla
