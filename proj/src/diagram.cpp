#include "oscilla/diagram.hpp"

#include <algorithm>
#include <cmath>

#include "oscilla/error.hpp"
#include "oscilla/parallel.hpp"
#include "oscilla/pucci.hpp"
#include "oscilla/roots.hpp"

namespace oscilla {

std::vector<double> make_c_grid(double c_min, double c_max, std::size_t points, bool log_spacing) {
    if (points == 0) throw Error(ErrorCode::EmptyGrid, "c-grid has no points");
    if (!(c_min > 0.0) || !(c_max >= c_min) || !std::isfinite(c_max)) {
        throw Error(ErrorCode::EmptyGrid, "c-grid needs 0 < c_min <= c_max");
    }
    std::vector<double> g(points);
    if (points == 1) {
        g[0] = c_min;
        return g;
    }
    for (std::size_t i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        g[i] = log_spacing ? c_min * std::pow(c_max / c_min, t) : c_min + t * (c_max - c_min);
    }
    g.back() = c_max;
    return g;
}

std::vector<double> cluster_near_zeros(std::vector<double> grid, const ZeroSequence& zeros, int levels) {
    if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "c-grid has no points");
    std::sort(grid.begin(), grid.end());
    const double lo = grid.front(), hi = grid.back();
    for (double a : zeros.alphas) {
        for (int k = 1; k <= levels; ++k) {
            const double d = a * std::pow(10.0, -k);
            for (double c : {a - d, a + d}) {
                if (c >= lo && c <= hi) grid.push_back(c);
            }
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::erase_if(grid, [&](double c) {
        return std::any_of(zeros.alphas.begin(), zeros.alphas.end(),
                           [c](double a) { return std::abs(c - a) <= 1e-14 * a; });
    });
    return grid;
}

DiagramPoint evaluate_point(const Nonlinearity& f, const PrimitiveCalculus& pc, const DiagramConfig& cfg,
                            const ZeroSequence& zeros, double c) {
    DiagramPoint pt;
    pt.c = c;
    pt.zero_interval_index = zeros.interval_index(c);
    const bool plap = cfg.op.kind == OperatorSpec::Kind::PLaplacian;
    ShootResult res;
    if (plap) {
        ShootConfig sc;
        sc.p = cfg.op.p;
        sc.N = cfg.N;
        sc.c = c;
        sc.r_max = cfg.r_max;
        sc.tol_ode = cfg.tol_ode;
        sc.event_tol = cfg.event_tol;
        sc.max_samples = cfg.samples;
        res = shoot(sc, f);
    } else {
        PucciShootConfig sc;
        sc.Lambda = cfg.op.Lambda;
        sc.N = cfg.N;
        sc.c = c;
        sc.r_max = cfg.r_max;
        sc.tol_ode = cfg.tol_ode;
        sc.event_tol = cfg.event_tol;
        sc.max_samples = cfg.samples;
        res = pucci_shoot(sc, f);
        pt.q_sign_changes = res.q_sign_changes;
    }
    pt.outcome = res.outcome;
    const auto v = pc.values(c);
    pt.F_c = v.F;
    pt.Fbar_c = v.F - v.min_F;
    if (res.outcome != Outcome::HitZero) return pt;

    pt.rho = res.rho;
    pt.rho_error_estimate = res.rho_error_estimate;
    pt.F_ok = v.F >= -cfg.check_tol;
    pt.area_ok = v.F - v.max_F >= -cfg.check_tol;
    if (plap) {
        const double p = cfg.op.p;
        pt.lambda = rescale_to_ball(res, cfg.R, p);
        const Diagnostics d = check_necessary_conditions(res, pc, p, cfg.R, cfg.check_tol);
        pt.lower_bound = d.lower_bound;
        pt.energy_residual = d.energy_residual_max;
    } else {
        pt.lambda = pucci_rescale(res, cfg.R);
        const PucciCheck chk = pucci_inequality_check(res, pc, res.lambda_shoot, cfg.R, cfg.check_tol);
        pt.lower_bound = chk.lower_bound;
        pt.energy_residual = chk.min_slack;
    }
    pt.bound_ok = pt.lambda >= pt.lower_bound - cfg.check_tol;
    return pt;
}

BifurcationDiagram diagram(const Nonlinearity& f, const PrimitiveCalculus& pc, const DiagramConfig& cfg,
                           std::span<const double> c_grid, const ZeroSequence& zeros) {
    if (c_grid.empty()) throw Error(ErrorCode::EmptyGrid, "diagram needs a nonempty c-grid");
    if (cfg.op.kind == OperatorSpec::Kind::Pucci && pc.Lambda() != cfg.op.Lambda) {
        throw Error(ErrorCode::DomainError, "primitive calculus Lambda differs from the operator's");
    }
    BifurcationDiagram d;
    d.config = cfg;
    d.zeros = zeros;
    d.points.resize(c_grid.size());
    parallel_for(c_grid.size(), cfg.threads,
                 [&](std::size_t i) { d.points[i] = evaluate_point(f, pc, cfg, zeros, c_grid[i]); });

    for (std::size_t i = 0; i < d.points.size();) {
        if (d.points[i].outcome != Outcome::HitZero) {
            ++i;
            continue;
        }
        Branch b;
        b.first = i;
        b.zero_interval_index = d.points[i].zero_interval_index;
        std::size_t j = i;
        while (j + 1 < d.points.size() && d.points[j + 1].outcome == Outcome::HitZero &&
               d.points[j + 1].zero_interval_index == b.zero_interval_index) {
            ++j;
        }
        b.last = j;
        b.lambda_min = b.lambda_max = d.points[i].lambda;
        for (std::size_t k = i; k <= j; ++k) {
            b.lambda_min = std::min(b.lambda_min, d.points[k].lambda);
            b.lambda_max = std::max(b.lambda_max, d.points[k].lambda);
        }
        d.branches.push_back(b);
        i = j + 1;
    }
    return d;
}

std::vector<Crossing> find_crossings(const BifurcationDiagram& d, const Nonlinearity& f, const PrimitiveCalculus& pc,
                                     double lambda_star) {
    struct Bracket {
        std::size_t branch, i;
        bool exact;
    };
    std::vector<Bracket> brackets;
    for (std::size_t b = 0; b < d.branches.size(); ++b) {
        const Branch& br = d.branches[b];
        for (std::size_t i = br.first; i <= br.last; ++i) {
            const double da = d.points[i].lambda - lambda_star;
            if (da == 0.0) {
                brackets.push_back({b, i, true});
                continue;
            }
            if (i < br.last) {
                const double db = d.points[i + 1].lambda - lambda_star;
                if ((da < 0.0) != (db < 0.0) && db != 0.0) brackets.push_back({b, i, false});
            }
        }
    }
    std::vector<Crossing> out(brackets.size());
    parallel_for(brackets.size(), d.config.threads, [&](std::size_t k) {
        const Bracket& br = brackets[k];
        Crossing& cr = out[k];
        cr.lambda_star = lambda_star;
        cr.branch = br.branch;
        const DiagramPoint& a = d.points[br.i];
        if (br.exact) {
            cr.point = a;
            cr.refined = true;
            return;
        }
        const DiagramPoint& b = d.points[br.i + 1];
        try {
            auto g = [&](double c) {
                if (c == a.c) return a.lambda - lambda_star;
                if (c == b.c) return b.lambda - lambda_star;
                const DiagramPoint p = evaluate_point(f, pc, d.config, d.zeros, c);
                if (p.outcome != Outcome::HitZero) throw Error(ErrorCode::NotAZeroHit, "branch interior lost");
                return p.lambda - lambda_star;
            };
            const double c = bracketed_root(g, a.c, b.c, 1e-12 * b.c);
            cr.point = evaluate_point(f, pc, d.config, d.zeros, c);
            cr.refined = cr.point.outcome == Outcome::HitZero;
        } catch (const Error&) {
            cr.refined = false;
        }
        if (!cr.refined) {
            cr.point = std::abs(a.lambda - lambda_star) <= std::abs(b.lambda - lambda_star) ? a : b;
        }
    });
    std::stable_sort(out.begin(), out.end(), [](const Crossing& x, const Crossing& y) { return x.point.c < y.point.c; });
    return out;
}

DiagramSummary summarize(const BifurcationDiagram& d) {
    DiagramSummary s;
    s.points = d.points.size();
    s.branches = d.branches.size();
    const bool plap = d.config.op.kind == OperatorSpec::Kind::PLaplacian;
    s.worst_residual = plap ? 0.0 : std::numeric_limits<double>::infinity();
    for (const DiagramPoint& p : d.points) {
        switch (p.outcome) {
            case Outcome::HitZero: ++s.hits; break;
            case Outcome::Stalled: ++s.stalled; break;
            case Outcome::Bounced: ++s.bounced; break;
            case Outcome::HorizonExceeded: ++s.horizon; break;
        }
        if (p.outcome != Outcome::HitZero) continue;
        if (!p.F_ok) ++s.sign_violations;
        if (!p.area_ok) ++s.area_violations;
        if (!p.bound_ok) ++s.bound_violations;
        s.worst_residual = plap ? std::max(s.worst_residual, p.energy_residual)
                                : std::min(s.worst_residual, p.energy_residual);
    }
    if (s.hits == 0) s.worst_residual = 0.0;
    return s;
}

}  // namespace oscilla
