#include "oscilla/primitive.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "oscilla/error.hpp"
#include "oscilla/quadrature.hpp"

namespace oscilla {

namespace {
constexpr double kMaxCells = 1e8;
}

PrimitiveCalculus::PrimitiveCalculus(Nonlinearity f, double p, double Lambda, double tol_quad)
    : f_(std::move(f)), p_(p), Lambda_(Lambda), tol_(tol_quad) {
    if (!(p_ > 1.0)) throw Error(ErrorCode::DomainError, "growth exponent p must exceed 1");
    if (!(Lambda_ >= 1.0)) throw Error(ErrorCode::DomainError, "Lambda must be >= 1");
    if (!(tol_ > 0.0)) throw Error(ErrorCode::DomainError, "quadrature tolerance must be positive");
    reciprocal_ = f_.kind() == NonlinearityKind::ReciprocalOscillation;
    // The reciprocal kind has its own closed route on the first cell, which
    // should cover the region where 1/s oscillates fast.
    const double scale = reciprocal_ ? 1.0 / 16.0 : f_.oscillation_scale();
    h_ = std::exp2(std::round(std::log2(scale)));
    cells_.emplace_back();
}

PrimitiveCalculus::Partial PrimitiveCalculus::integrate_span(double a, double b) const {
    Partial out;
    if (!(b > a)) return out;
    std::vector<double> cuts = f_.sign_changes(a, b);
    const auto k = f_.kinks(a, b);
    cuts.insert(cuts.end(), k.begin(), k.end());
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    auto fn = [this](double s) { return f_(s); };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        double v = 0.0;
        if (cuts[i] == 0.0) {
            // s = w t^4 smooths algebraic behaviour s^r at the origin.
            const double w = cuts[i + 1];
            auto g = [this, w](double t) {
                const double t2 = t * t;
                return 4.0 * w * t * t2 * f_(w * t2 * t2);
            };
            v = integrate(g, 0.0, 1.0, tol_).value;
        } else {
            v = integrate(fn, cuts[i], cuts[i + 1], tol_).value;
        }
        if (v >= 0.0) {
            out.plus += v;
        } else {
            out.minus -= v;
        }
    }
    return out;
}

PrimitiveCalculus::Partial PrimitiveCalculus::small_argument(double s) const {
    // s^{1/r}(1 + sin(1/s)) = smooth part + s^{1/r} sin(1/s); with u = 1/s the
    // oscillating part is the tail integral of u^{-(2+1/r)} sin u from 1/s.
    Partial out;
    if (!(s > 0.0)) return out;
    const double e = 1.0 / f_.parameter();
    const double smooth = std::pow(s, e + 1.0) / (e + 1.0);
    const double osc = oscillatory_tail(1.0 / s, e + 2.0, tol_);
    out.plus = smooth + osc;
    return out;
}

void PrimitiveCalculus::extend_to(std::size_t k) const {
    {
        std::shared_lock lock(mu_);
        if (cells_.size() > k) return;
    }
    std::unique_lock lock(mu_);
    while (cells_.size() <= k) {
        const std::size_t j = cells_.size() - 1;
        Cell& c = cells_[j];
        const double a = h_ * static_cast<double>(j);
        const double b = h_ * static_cast<double>(j + 1);
        const double w = 1.0 / (Lambda_ * Lambda_);
        Cell next;
        next.min_start = c.min_start;
        next.max_start = c.max_start;
        next.min_L_start = c.min_L_start;
        c.crit.clear();
        if (reciprocal_ && j == 0) {
            const Partial part = small_argument(b);
            next.plus_start = part.plus;
            next.minus_start = 0.0;
        } else {
            double plus = c.plus_start;
            double minus = c.minus_start;
            double lo = a;
            for (double z : f_.sign_changes(a, b)) {
                const Partial part = integrate_span(lo, z);
                plus += part.plus;
                minus += part.minus;
                const Critical cr{z, plus - minus, plus - w * minus};
                c.crit.push_back(cr);
                next.min_start = std::min(next.min_start, cr.F);
                next.max_start = std::max(next.max_start, cr.F);
                next.min_L_start = std::min(next.min_L_start, cr.F_Lambda);
                lo = z;
            }
            const Partial part = integrate_span(lo, b);
            next.plus_start = plus + part.plus;
            next.minus_start = minus + part.minus;
        }
        const double Fb = next.plus_start - next.minus_start;
        next.min_start = std::min(next.min_start, Fb);
        next.max_start = std::max(next.max_start, Fb);
        next.min_L_start = std::min(next.min_L_start, next.plus_start - w * next.minus_start);
        cells_.push_back(std::move(next));
    }
}

PrimitiveCalculus::Cell PrimitiveCalculus::cell(std::size_t k) const {
    extend_to(k + 1);
    std::shared_lock lock(mu_);
    return cells_[k];
}

std::size_t PrimitiveCalculus::cached_cells() const {
    std::shared_lock lock(mu_);
    return cells_.size();
}

PrimitiveCalculus::Values PrimitiveCalculus::values(double s) const {
    if (!(s >= 0.0) || !std::isfinite(s)) {
        throw Error(ErrorCode::DomainError, "primitive evaluated at a negative or non-finite argument");
    }
    Values v;
    if (s == 0.0) return v;
    const double kd = std::floor(s / h_);
    if (kd > kMaxCells) throw Error(ErrorCode::DomainError, "primitive argument beyond the checkpoint budget");
    const auto k = static_cast<std::size_t>(kd);
    const Cell c = cell(k);
    const double a = h_ * kd;
    const Partial part = (reciprocal_ && k == 0) ? small_argument(s) : integrate_span(a, s);
    const double w = 1.0 / (Lambda_ * Lambda_);
    v.Fplus = c.plus_start + part.plus;
    v.Fminus = c.minus_start + part.minus;
    v.F = v.Fplus - v.Fminus;
    v.F_Lambda = v.Fplus - w * v.Fminus;
    v.min_F = std::min(c.min_start, v.F);
    v.max_F = std::max(c.max_start, v.F);
    v.min_F_Lambda = std::min(c.min_L_start, v.F_Lambda);
    for (const Critical& cr : c.crit) {
        if (cr.s > s) break;
        v.min_F = std::min(v.min_F, cr.F);
        v.max_F = std::max(v.max_F, cr.F);
        v.min_F_Lambda = std::min(v.min_F_Lambda, cr.F_Lambda);
    }
    return v;
}

double PrimitiveCalculus::F(double s) const { return values(s).F; }
double PrimitiveCalculus::Fplus(double s) const { return values(s).Fplus; }
double PrimitiveCalculus::Fminus(double s) const { return values(s).Fminus; }
double PrimitiveCalculus::F_Lambda(double s) const { return values(s).F_Lambda; }
double PrimitiveCalculus::running_min(double s) const { return values(s).min_F; }
double PrimitiveCalculus::running_max(double s) const { return values(s).max_F; }
double PrimitiveCalculus::running_min_Lambda(double s) const { return values(s).min_F_Lambda; }

double PrimitiveCalculus::Fbar(double s) const {
    const Values v = values(s);
    return v.F - v.min_F;
}

double PrimitiveCalculus::Fbar_Lambda(double s) const {
    const Values v = values(s);
    return v.F_Lambda - v.min_F_Lambda;
}

double PrimitiveCalculus::Funder(double s1, double s2) const {
    if (s1 > s2) throw Error(ErrorCode::DomainError, "Funder needs s1 <= s2");
    return F(s2) - running_max(s1);
}

}  // namespace oscilla
