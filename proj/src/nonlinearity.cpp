#include "oscilla/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "oscilla/error.hpp"
#include "oscilla/roots.hpp"

namespace oscilla {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTouchPhase = 1.5 * kPi;  // 1 + sin x vanishes at 3pi/2 + 2pi k

double polish_touch_phase(double x0) {
    // 1 + sin x has a double root where cos x changes sign from - to +.
    return bracketed_root([](double x) { return std::cos(x); }, x0 - 1.0, x0 + 1.0, 1e-15 * (1.0 + x0));
}

}  // namespace

const char* to_string(Direction d) { return d == Direction::Zero ? "zero" : "infinity"; }

const char* to_string(NonlinearityKind k) {
    switch (k) {
        case NonlinearityKind::PowerTimesOnePlusSin: return "power_sin";
        case NonlinearityKind::ReciprocalOscillation: return "reciprocal_sin";
        case NonlinearityKind::EnvelopeTimesOnePlusSin: return "envelope_sin";
        case NonlinearityKind::PureSine: return "pure_sine";
        case NonlinearityKind::CustomTable: return "table";
        case NonlinearityKind::Function: return "function";
    }
    return "unknown";
}

PiecewiseLinear::PiecewiseLinear(const std::vector<std::pair<double, double>>& samples) {
    if (samples.empty()) throw Error(ErrorCode::DomainError, "table needs at least one sample");
    if (samples.front().first != 0.0) {
        throw Error(ErrorCode::DomainError, "table abscissae must start at 0");
    }
    xs_.reserve(samples.size());
    ys_.reserve(samples.size());
    for (const auto& [s, v] : samples) {
        if (!std::isfinite(s) || !std::isfinite(v)) {
            throw Error(ErrorCode::DomainError, "table samples must be finite");
        }
        if (!xs_.empty() && s <= xs_.back()) {
            throw Error(ErrorCode::DomainError, "table abscissae must increase strictly");
        }
        xs_.push_back(s);
        ys_.push_back(v);
    }
}

double PiecewiseLinear::operator()(double s) const {
    if (xs_.size() == 1 || s <= 0.0) return ys_.front();
    auto it = std::upper_bound(xs_.begin(), xs_.end(), s);
    std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
    if (hi >= xs_.size()) hi = xs_.size() - 1;
    const std::size_t lo = hi - 1;
    const double t = (s - xs_[lo]) / (xs_[hi] - xs_[lo]);
    return ys_[lo] + t * (ys_[hi] - ys_[lo]);
}

Nonlinearity Nonlinearity::power_sin(double r, Direction dir) {
    if (!(r > 0.0)) throw Error(ErrorCode::DomainError, "power_sin needs r > 0");
    Nonlinearity f;
    f.kind_ = NonlinearityKind::PowerTimesOnePlusSin;
    f.r_ = r;
    f.direction_ = dir;
    return f;
}

Nonlinearity Nonlinearity::reciprocal_sin(double r, Direction dir) {
    if (!(r > 0.0)) throw Error(ErrorCode::DomainError, "reciprocal_sin needs r > 0");
    Nonlinearity f;
    f.kind_ = NonlinearityKind::ReciprocalOscillation;
    f.r_ = r;
    f.direction_ = dir;
    return f;
}

Nonlinearity Nonlinearity::envelope_sin(PiecewiseLinear envelope, Direction dir) {
    if (envelope.empty()) throw Error(ErrorCode::DomainError, "envelope_sin needs an envelope table");
    const auto ys = envelope.values();
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (!(ys[i] > 0.0)) throw Error(ErrorCode::DomainError, "envelope must be positive");
        if (i > 0 && ys[i] < ys[i - 1]) throw Error(ErrorCode::DomainError, "envelope must be nondecreasing");
    }
    Nonlinearity f;
    f.kind_ = NonlinearityKind::EnvelopeTimesOnePlusSin;
    f.table_ = std::move(envelope);
    f.direction_ = dir;
    return f;
}

Nonlinearity Nonlinearity::pure_sine(Direction dir) {
    Nonlinearity f;
    f.kind_ = NonlinearityKind::PureSine;
    f.direction_ = dir;
    return f;
}

Nonlinearity Nonlinearity::table(PiecewiseLinear samples, Direction dir) {
    if (samples.empty()) throw Error(ErrorCode::DomainError, "table needs samples");
    Nonlinearity f;
    f.kind_ = NonlinearityKind::CustomTable;
    f.table_ = std::move(samples);
    f.direction_ = dir;
    return f;
}

Nonlinearity Nonlinearity::function(std::function<double(double)> fn, Direction dir, std::string name,
                                    double scan_step) {
    if (!fn) throw Error(ErrorCode::DomainError, "function nonlinearity needs a callable");
    if (!(scan_step > 0.0)) throw Error(ErrorCode::DomainError, "scan_step must be positive");
    Nonlinearity f;
    f.kind_ = NonlinearityKind::Function;
    f.fn_ = std::make_shared<const std::function<double(double)>>(std::move(fn));
    f.direction_ = dir;
    f.name_ = std::move(name);
    f.scan_step_ = scan_step;
    return f;
}

double Nonlinearity::raw(double s) const {
    switch (kind_) {
        case NonlinearityKind::PowerTimesOnePlusSin:
            return s == 0.0 ? 0.0 : std::pow(s, r_) * (1.0 + std::sin(s));
        case NonlinearityKind::ReciprocalOscillation:
            return s == 0.0 ? 0.0 : std::pow(s, 1.0 / r_) * (1.0 + std::sin(1.0 / s));
        case NonlinearityKind::EnvelopeTimesOnePlusSin:
            return table_(s) * (1.0 + std::sin(s));
        case NonlinearityKind::PureSine:
            return std::sin(s);
        case NonlinearityKind::CustomTable:
            return table_(s);
        case NonlinearityKind::Function:
            return (*fn_)(s);
    }
    return 0.0;
}

double Nonlinearity::operator()(double s) const {
    if (s < 0.0) s = 0.0;
    const double v = raw(s);
    return (clip_ > 0.0 && s <= clip_ && v < 0.0) ? 0.0 : v;
}

std::string Nonlinearity::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case NonlinearityKind::PowerTimesOnePlusSin: os << "s^" << r_ << "(1+sin s)"; break;
        case NonlinearityKind::ReciprocalOscillation: os << "s^(1/" << r_ << ")(1+sin(1/s))"; break;
        case NonlinearityKind::EnvelopeTimesOnePlusSin: os << "g(s)(1+sin s)"; break;
        case NonlinearityKind::PureSine: os << "sin s"; break;
        case NonlinearityKind::CustomTable: os << "table[" << table_.abscissae().size() << "]"; break;
        case NonlinearityKind::Function: os << name_; break;
    }
    if (clip_ > 0.0) os << " clipped to f+ on [0," << clip_ << "]";
    return os.str();
}

Nonlinearity Nonlinearity::clipped_below(double limit) const {
    Nonlinearity g = *this;
    g.clip_ = std::max(clip_, limit);
    return g;
}

bool Nonlinearity::known_nonnegative() const {
    switch (kind_) {
        case NonlinearityKind::PowerTimesOnePlusSin:
        case NonlinearityKind::ReciprocalOscillation:
        case NonlinearityKind::EnvelopeTimesOnePlusSin:
            return true;
        default:
            return false;
    }
}

double Nonlinearity::oscillation_scale() const {
    switch (kind_) {
        case NonlinearityKind::PowerTimesOnePlusSin:
        case NonlinearityKind::EnvelopeTimesOnePlusSin:
        case NonlinearityKind::PureSine:
            return 4.0;
        case NonlinearityKind::ReciprocalOscillation:
            return 0.25;
        case NonlinearityKind::CustomTable: {
            const auto xs = table_.abscissae();
            if (xs.size() < 2) return 4.0;
            return std::clamp(4.0 * (xs.back() / static_cast<double>(xs.size() - 1)), 1e-3, 64.0);
        }
        case NonlinearityKind::Function:
            return 32.0 * scan_step_;
    }
    return 1.0;
}

std::vector<double> Nonlinearity::kinks(double a, double b) const {
    std::vector<double> out;
    if (kind_ == NonlinearityKind::CustomTable || kind_ == NonlinearityKind::EnvelopeTimesOnePlusSin) {
        for (double x : table_.abscissae()) {
            if (x > a && x < b) out.push_back(x);
        }
    }
    if (clip_ > a && clip_ < b) out.push_back(clip_);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> Nonlinearity::sign_changes(double a, double b) const {
    std::vector<double> out;
    if (!(b > a)) return out;
    // Below the clip limit f is replaced by f+, which never changes sign.
    const double lo = std::max(a, clip_);
    if (lo >= b) return out;

    switch (kind_) {
        case NonlinearityKind::PowerTimesOnePlusSin:
        case NonlinearityKind::ReciprocalOscillation:
        case NonlinearityKind::EnvelopeTimesOnePlusSin:
            break;
        case NonlinearityKind::PureSine: {
            for (double k = std::floor(lo / kPi) + 1.0; k * kPi < b; k += 1.0) {
                const double z = k * kPi;
                if (z > lo) out.push_back(z);
            }
            break;
        }
        case NonlinearityKind::CustomTable: {
            const auto xs = table_.abscissae();
            const auto ys = table_.values();
            // Crossings strictly inside segments, and sign flips through a zero node.
            for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
                if ((ys[i] < 0.0 && ys[i + 1] > 0.0) || (ys[i] > 0.0 && ys[i + 1] < 0.0)) {
                    const double z = xs[i] - ys[i] * (xs[i + 1] - xs[i]) / (ys[i + 1] - ys[i]);
                    if (z > lo && z < b) out.push_back(z);
                }
            }
            for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
                if (ys[i] == 0.0 && xs[i] > lo && xs[i] < b) {
                    std::size_t l = i, h = i;
                    while (l > 0 && ys[l] == 0.0) --l;
                    while (h + 1 < xs.size() && ys[h] == 0.0) ++h;
                    if (ys[l] * ys[h] < 0.0 && l + 1 == i) out.push_back(xs[i]);
                }
            }
            if (xs.size() >= 2) {
                const std::size_t n = xs.size();
                const double slope = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
                if (slope != 0.0 && ys[n - 1] != 0.0) {
                    const double z = xs[n - 1] - ys[n - 1] / slope;
                    if (z > xs[n - 1] && z > lo && z < b) out.push_back(z);
                }
            }
            break;
        }
        case NonlinearityKind::Function: {
            const auto n = static_cast<std::size_t>(std::max(8.0, std::ceil((b - lo) / scan_step_)));
            const double h = (b - lo) / static_cast<double>(n);
            double x0 = lo;
            double f0 = raw(x0);
            for (std::size_t i = 1; i <= n; ++i) {
                const double x1 = (i == n) ? b : lo + h * static_cast<double>(i);
                const double f1 = raw(x1);
                if ((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0)) {
                    const double z = bracketed_root([this](double x) { return raw(x); }, x0, x1,
                                                    1e-15 * (1.0 + std::abs(x1)));
                    if (z > lo && z < b) out.push_back(z);
                }
                x0 = x1;
                f0 = f1;
            }
            break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

int ZeroSequence::interval_index(double c) const {
    if (alphas.empty() || !(c > 0.0)) return 0;
    if (direction == Direction::Infinity) {
        auto it = std::lower_bound(alphas.begin(), alphas.end(), c);
        if (it == alphas.end()) return 0;
        return static_cast<int>(it - alphas.begin()) + 1;
    }
    // Descending zeros: (alpha_{n+1}, alpha_n] needs both ends known.
    int n = 0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (c <= alphas[i]) n = static_cast<int>(i) + 1;
    }
    if (n == 0 || n == static_cast<int>(alphas.size())) return 0;
    return n;
}

namespace {

std::vector<double> zeros_of_samples(const Nonlinearity& f, std::span<const double> grid, double tol) {
    // Sign changes between consecutive samples plus local minima of |f| that
    // polish to a zero (touch zeros).
    std::vector<double> out;
    auto raw = [&f](double x) { return f(x); };
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = f(grid[i]);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (vals[i] == 0.0 && grid[i] > 0.0) {
            out.push_back(grid[i]);
            continue;
        }
        if ((vals[i] < 0.0 && vals[i + 1] > 0.0) || (vals[i] > 0.0 && vals[i + 1] < 0.0)) {
            out.push_back(bracketed_root(raw, grid[i], grid[i + 1], 1e-15 * (1.0 + grid[i + 1])));
            continue;
        }
        if (i > 0 && std::abs(vals[i]) < std::abs(vals[i - 1]) && std::abs(vals[i]) <= std::abs(vals[i + 1]) &&
            vals[i] != 0.0 && (vals[i - 1] < 0.0) == (vals[i + 1] < 0.0)) {
            const auto [xm, fm] =
                local_minimum([&](double x) { return std::abs(f(x)); }, grid[i - 1], grid[i + 1], 52);
            if (fm <= tol && xm > 0.0) out.push_back(xm);
        }
    }
    if (!grid.empty() && vals.back() == 0.0 && grid.back() > 0.0) out.push_back(grid.back());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)); }),
              out.end());
    return out;
}

}  // namespace

ZeroSequence find_zeros(const Nonlinearity& f, std::size_t count, const ZeroOptions& opts) {
    if (count == 0) throw Error(ErrorCode::DomainError, "find_zeros: count must be >= 1");
    ZeroSequence zs;
    zs.count = count;
    zs.direction = f.direction();
    const bool at_inf = f.direction() == Direction::Infinity;
    std::vector<double> found;

    auto fail = [&](const std::string& why) {
        throw Error(ErrorCode::NoZerosFound, f.describe() + ": found " + std::to_string(found.size()) + " of " +
                                                  std::to_string(count) + " zeros (" + why + ")");
    };

    const double clip = f.clip_limit();
    switch (f.kind()) {
        case NonlinearityKind::PowerTimesOnePlusSin:
        case NonlinearityKind::EnvelopeTimesOnePlusSin:
            if (!at_inf) fail("zeros of 1+sin s do not accumulate at 0");
            for (double k = 0; found.size() < count; k += 1.0) {
                const double z = polish_touch_phase(kTouchPhase + 2.0 * kPi * k);
                if (z > clip) found.push_back(z);
            }
            break;
        case NonlinearityKind::ReciprocalOscillation:
            if (at_inf) fail("zeros of 1+sin(1/s) do not diverge");
            for (double k = 0; found.size() < count; k += 1.0) {
                found.push_back(1.0 / polish_touch_phase(kTouchPhase + 2.0 * kPi * k));
            }
            break;
        case NonlinearityKind::PureSine:
            if (!at_inf) fail("zeros of sin s do not accumulate at 0");
            for (double k = 1; found.size() < count; k += 1.0) {
                const double z =
                    bracketed_root([](double x) { return std::sin(x); }, k * kPi - 1.0, k * kPi + 1.0, 1e-15 * k);
                if (z >= clip) found.push_back(z);
            }
            break;
        case NonlinearityKind::CustomTable:
        case NonlinearityKind::Function: {
            std::vector<double> grid;
            if (f.kind() == NonlinearityKind::CustomTable) {
                const auto xs = f.samples().abscissae();
                grid.assign(xs.begin(), xs.end());
                if (opts.horizon > 0.0) {
                    std::erase_if(grid, [&](double x) { return x > opts.horizon; });
                }
            } else if (at_inf) {
                const double horizon = opts.horizon > 0.0 ? opts.horizon : 1e3;
                const auto n = static_cast<std::size_t>(std::ceil(horizon / f.scan_step()));
                for (std::size_t i = 0; i <= n; ++i) grid.push_back(horizon * static_cast<double>(i) / n);
            } else {
                const double horizon = opts.horizon > 0.0 ? opts.horizon : 1.0;
                const std::size_t n = 12 * 2000;
                for (std::size_t i = 0; i <= n; ++i) {
                    grid.push_back(horizon * std::pow(10.0, -12.0 * static_cast<double>(n - i) / n));
                }
            }
            auto zeros = zeros_of_samples(f, grid, opts.zero_tolerance);
            // Below the clip limit f+ vanishes on whole intervals; only the
            // zeros of f at or above the limit define the sequence.
            std::erase_if(zeros, [&](double z) { return z < clip; });
            if (at_inf) {
                for (double z : zeros) {
                    if (found.size() == count) break;
                    found.push_back(z);
                }
            } else {
                for (auto it = zeros.rbegin(); it != zeros.rend() && found.size() < count; ++it) {
                    found.push_back(*it);
                }
            }
            if (found.size() < count) fail("search horizon exhausted");
            break;
        }
    }

    for (double z : found) {
        if (!(std::abs(f(z)) <= opts.zero_tolerance)) {
            throw Error(ErrorCode::NoZerosFound,
                        f.describe() + ": candidate zero " + std::to_string(z) + " fails |f| <= tolerance");
        }
    }
    zs.alphas = std::move(found);
    return zs;
}

}  // namespace oscilla
