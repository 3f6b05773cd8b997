#include "oscilla/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "oscilla/error.hpp"
#include "oscilla/roots.hpp"

namespace oscilla {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double lambda_under_common(double numer, double scale, double L_minus, double L_plus) {
    if (std::isnan(L_minus) || std::isnan(L_plus)) throw Error(ErrorCode::DomainError, "limit is NaN");
    if (L_minus > L_plus) throw Error(ErrorCode::DomainError, "L- exceeds L+");
    if (L_plus < 0.0) return kInf;
    if (L_minus == 0.0 && L_plus == 0.0) return kInf;
    const double denom = L_plus - std::min(0.0, L_minus);
    if (std::isinf(denom)) return 0.0;
    return numer / (scale * denom);
}
}  // namespace

double unit_ball_volume(int N) {
    if (N < 1) throw Error(ErrorCode::DomainError, "dimension must be >= 1");
    const double h = 0.5 * N;
    return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

BallGeometry::BallGeometry(int n, double r, double d) : N(n), R(r), delta(d) {
    if (N < 1 || !(R > 0.0)) throw Error(ErrorCode::DomainError, "ball needs N >= 1 and R > 0");
    if (!(delta > 0.0 && delta < R)) throw Error(ErrorCode::DomainError, "delta must lie in (0, R)");
}

double BallGeometry::measure() const { return unit_ball_volume(N) * std::pow(R, N); }

double BallGeometry::layer_measure() const {
    return unit_ball_volume(N) * (std::pow(R, N) - std::pow(R - delta, N));
}

std::string OperatorSpec::describe() const {
    std::ostringstream os;
    if (kind == Kind::PLaplacian) {
        os << "p-Laplacian(p=" << p << ")";
    } else {
        os << "Pucci M+(Lambda=" << Lambda << ")";
    }
    return os.str();
}

double lambda_under_plap(double p, double R, double L_minus, double L_plus) {
    if (!(p > 1.0) || !(R > 0.0)) throw Error(ErrorCode::DomainError, "lambda_under_plap needs p > 1, R > 0");
    return lambda_under_common(p - 1.0, p * std::pow(R, p), L_minus, L_plus);
}

double lambda_under_pucci(double Lambda, double R, double L_minus, double L_plus) {
    if (!(Lambda >= 1.0) || !(R > 0.0)) {
        throw Error(ErrorCode::DomainError, "lambda_under_pucci needs Lambda >= 1, R > 0");
    }
    return lambda_under_common(1.0, 2.0 * Lambda * R * R, L_minus, L_plus);
}

std::vector<LambdaTerm> lambda_n_sequence(const PrimitiveCalculus& pc, int N, double R,
                                          std::span<const double> gammas, double M, double beta, Direction ell,
                                          int delta_points) {
    if (!(M >= 0.0)) throw Error(ErrorCode::InfeasibleDelta, "M must be finite and >= 0");
    if (!(beta > 0.0)) throw Error(ErrorCode::DomainError, "beta must be positive");
    if (delta_points < 2) throw Error(ErrorCode::DomainError, "delta grid needs at least 2 points");
    const double p = pc.p();
    const double share = ell == Direction::Zero ? 1.0 / (1.0 + M) : 1.0 / (2.0 * (1.0 + M));

    std::vector<LambdaTerm> out;
    out.reserve(gammas.size());
    for (double gamma : gammas) {
        if (!(gamma > 0.0)) throw Error(ErrorCode::DomainError, "gamma_n must be positive");
        const double fbar = pc.Fbar(gamma);
        if (!(fbar > 0.0)) {
            std::ostringstream os;
            os << "Fbar(" << gamma << ") = " << fbar;
            throw Error(ErrorCode::NonpositiveFbar, os.str());
        }
        LambdaTerm best;
        best.lambda = kInf;
        for (int i = 0; i < delta_points; ++i) {
            // Geometric grid from 1e-3 R up to just below R.
            const double t = static_cast<double>(i) / delta_points;
            const double delta = R * std::pow(1e-3, 1.0 - t);
            const BallGeometry g(N, R, delta);
            const double C1 = share * g.measure() - g.layer_measure();
            if (!(C1 > 0.0)) continue;
            const double C2 = beta / p * g.measure() / std::pow(delta, p);
            const double lambda = C2 / C1 * std::pow(gamma, p) / fbar;
            if (lambda < best.lambda) best = {gamma, delta, C1, C2, lambda, fbar};
        }
        if (!std::isfinite(best.lambda)) {
            throw Error(ErrorCode::InfeasibleDelta, "no delta on the grid gives C1 > 0");
        }
        out.push_back(best);
    }
    return out;
}

LambdaBar summarize_lambda_bar(std::span<const LambdaTerm> terms) {
    LambdaBar lb;
    if (terms.empty()) return lb;
    const std::size_t q = std::max<std::size_t>(1, terms.size() / 4);
    double sum = 0.0;
    for (std::size_t i = terms.size() - q; i < terms.size(); ++i) sum += terms[i].lambda;
    lb.value = sum / static_cast<double>(q);
    lb.window = q;
    // Trend over the second half of the sequence.
    const std::size_t start = terms.size() / 2;
    bool up = true, down = true;
    for (std::size_t i = start + 1; i < terms.size(); ++i) {
        if (terms[i].lambda < terms[i - 1].lambda) up = false;
        if (terms[i].lambda > terms[i - 1].lambda) down = false;
    }
    lb.monotone = up || down;
    return lb;
}

std::vector<double> select_gammas(const PrimitiveCalculus& pc, const ZeroSequence& zeros) {
    const auto& a = zeros.alphas;
    const double p = pc.p();
    auto ratio = [&](double s) { return pc.Fbar(s) / std::pow(s, p); };
    std::vector<double> out;
    const std::size_t n = zeros.direction == Direction::Infinity ? a.size() : (a.empty() ? 0 : a.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double lo, hi;
        if (zeros.direction == Direction::Infinity) {
            lo = i == 0 ? 0.0 : a[i - 1];
            hi = a[i];
        } else {
            lo = a[i + 1];
            hi = a[i];
        }
        constexpr int kSamples = 256;
        const double step = (hi - lo) / kSamples;
        int best = kSamples;
        double best_val = -kInf;
        for (int j = 1; j <= kSamples; ++j) {
            const double v = ratio(lo + step * j);
            if (v > best_val) {
                best_val = v;
                best = j;
            }
        }
        double gamma = lo + step * best;
        const double a0 = lo + step * std::max(best - 1, 1);
        const double b0 = lo + step * std::min(best + 1, kSamples);
        if (b0 > a0) {
            const auto [x, neg] = local_minimum([&](double s) { return -ratio(s); }, a0, b0, 40);
            if (-neg > best_val) gamma = x;
        }
        out.push_back(gamma);
    }
    return out;
}

double estimate_M(const PrimitiveCalculus& pc, std::span<const double> gammas) {
    double M = 0.0;
    for (double g : gammas) {
        const auto v = pc.values(g);
        if (v.min_F >= 0.0) continue;
        if (!(v.F > 0.0)) return kInf;
        M = std::max(M, -v.min_F / v.F);
    }
    return M;
}

double per_solution_lower_bound(const PrimitiveCalculus& pc, double c, double p, double R) {
    const double fbar = pc.Fbar(c);
    if (!(fbar > 0.0)) throw Error(ErrorCode::NonpositiveFbar, "Fbar(c) <= 0 in the per-solution bound");
    return (p - 1.0) * std::pow(c, p) / (p * std::pow(R, p) * fbar);
}

double per_solution_lower_bound_pucci(const PrimitiveCalculus& pc, double c, double R) {
    const double fbar = pc.Fbar_Lambda(c);
    if (!(fbar > 0.0)) throw Error(ErrorCode::NonpositiveFbar, "Fbar_Lambda(c) <= 0 in the per-solution bound");
    return c * c / (2.0 * pc.Lambda() * R * R * fbar);
}

Reduction reduce_negative_f0(const Nonlinearity& f) {
    Reduction out{f, false, ""};
    if (f.direction() != Direction::Infinity) {
        out.note = "not applicable: reduction only for large solutions";
        return out;
    }
    if (f.f0() >= 0.0) {
        out.note = "not applicable: f(0) >= 0";
        return out;
    }
    const ZeroSequence z = find_zeros(f, 1);
    out.g = f.clipped_below(z.alphas.front());
    out.applied = true;
    std::ostringstream os;
    os << "f(0) < 0: replaced f by f+ on [0, " << z.alphas.front() << "]";
    out.note = os.str();
    return out;
}

ThresholdReport analyze(const Nonlinearity& f_in, const OperatorSpec& op, int N, double R,
                        const AnalyzeOptions& opts) {
    if (N < 1 || !(R > 0.0)) throw Error(ErrorCode::DomainError, "ball needs N >= 1 and R > 0");
    ThresholdReport rep;
    rep.op = op;
    rep.ell = f_in.direction();
    rep.N = N;
    rep.R = R;
    rep.f0 = f_in.f0();

    Nonlinearity f = f_in;
    if (rep.f0 < 0.0 && rep.ell == Direction::Infinity) {
        Reduction red = reduce_negative_f0(f_in);
        f = red.g;
        rep.reduced = red.applied;
        rep.reduction_note = red.note;
    }

    const double p = op.kind == OperatorSpec::Kind::PLaplacian ? op.p : 2.0;
    PrimitiveCalculus pc(f, p, op.kind == OperatorSpec::Kind::Pucci ? op.Lambda : 1.0, opts.tol_quad);

    rep.limits = estimate_limits(pc, rep.ell, LimitTarget::F, opts.limits);
    rep.limits_Lambda = estimate_limits(pc, rep.ell, LimitTarget::FLambda, opts.limits);
    rep.lambda_under_plap = lambda_under_plap(p, R, rep.limits.L_minus, rep.limits.L_plus);
    rep.lambda_under_pucci = lambda_under_pucci(pc.Lambda(), R, rep.limits_Lambda.L_minus, rep.limits_Lambda.L_plus);
    rep.lambda_under = op.kind == OperatorSpec::Kind::PLaplacian ? rep.lambda_under_plap : rep.lambda_under_pucci;

    try {
        rep.zeros = find_zeros(f, opts.zero_count, opts.zeros);
        rep.gammas = select_gammas(pc, rep.zeros);
        rep.M = estimate_M(pc, rep.gammas);
        rep.sequence = lambda_n_sequence(pc, N, R, rep.gammas, rep.M, opts.beta, rep.ell, opts.delta_points);
        rep.lambda_bar = summarize_lambda_bar(rep.sequence);
        rep.existence_available = !rep.sequence.empty();
        if (!rep.existence_available) rep.existence_note = "no zero intervals to build gamma_n from";
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoZerosFound && e.code() != ErrorCode::InfeasibleDelta &&
            e.code() != ErrorCode::NonpositiveFbar) {
            throw;
        }
        rep.existence_available = false;
        rep.existence_note = e.what();
    }

    if (rep.existence_available && std::isfinite(rep.lambda_under_plap)) {
        rep.ordering_ok = rep.lambda_under_plap <= rep.lambda_bar.value * (1.0 + 1e-12);
    }
    return rep;
}

}  // namespace oscilla
