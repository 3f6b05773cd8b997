#include "oscilla/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "oscilla/error.hpp"

namespace oscilla::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) fail(where + ": missing \"" + key + "\"");
    return j.at(key);
}

double get_number(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number()) fail(where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where + "." + key + " must be finite");
    return x;
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
    return j.contains(key) ? get_number(j, key, where) : fallback;
}

std::size_t count_or(const json& j, const char* key, std::size_t fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(where + "." + key + " must be a nonnegative integer");
    return static_cast<std::size_t>(v.get<long long>());
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) fail(where + " must be an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : keys) known = known || item.key() == k;
        if (!known) fail(where + ": unknown key \"" + item.key() + "\"");
    }
}

PiecewiseLinear samples_from(const json& j, const std::string& where) {
    const json& s = require(j, "samples", where);
    if (!s.is_array() || s.size() < 2) fail(where + ".samples must be an array of at least two [s, f] pairs");
    std::vector<std::pair<double, double>> pts;
    for (const json& row : s) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
            fail(where + ".samples entries must be [s, f] number pairs");
        }
        pts.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    try {
        return PiecewiseLinear(pts);
    } catch (const Error& e) {
        fail(where + ".samples: " + e.what());
    }
}

}  // namespace

Nonlinearity nonlinearity_from_json(const json& j) {
    const std::string where = "nonlinearity";
    only_keys(j, {"kind", "r", "samples", "direction"}, where);
    const json& k = require(j, "kind", where);
    if (!k.is_string()) fail(where + ".kind must be a string");
    const std::string kind = k.get<std::string>();

    std::optional<Direction> dir;
    if (j.contains("direction")) {
        const json& d = j.at("direction");
        if (d == "zero") {
            dir = Direction::Zero;
        } else if (d == "infinity") {
            dir = Direction::Infinity;
        } else {
            fail(where + ".direction must be \"zero\" or \"infinity\"");
        }
    }
    auto positive_r = [&]() {
        const double r = get_number(j, "r", where);
        if (!(r > 0.0)) fail(where + ".r must be positive");
        return r;
    };
    try {
        if (kind == "power_sin") return Nonlinearity::power_sin(positive_r(), dir.value_or(Direction::Infinity));
        if (kind == "reciprocal_sin") return Nonlinearity::reciprocal_sin(positive_r(), dir.value_or(Direction::Zero));
        if (kind == "envelope_sin") {
            return Nonlinearity::envelope_sin(samples_from(j, where), dir.value_or(Direction::Infinity));
        }
        if (kind == "pure_sine") return Nonlinearity::pure_sine(dir.value_or(Direction::Infinity));
        if (kind == "table") return Nonlinearity::table(samples_from(j, where), dir.value_or(Direction::Infinity));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        fail(where + ": " + e.what());
    }
    fail(where + ".kind \"" + kind + "\" is not one of power_sin, reciprocal_sin, envelope_sin, pure_sine, table");
}

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    only_keys(j, {"nonlinearity", "operator", "geometry", "scan", "tolerances", "outputs", "minimize", "lambda_star",
                  "zero_count", "diagram"},
              "config");
    cfg.raw = j;
    cfg.hash = config_hash(j);
    cfg.f = nonlinearity_from_json(require(j, "nonlinearity", "config"));

    const json& op = require(j, "operator", "config");
    only_keys(op, {"plap", "pucci"}, "operator");
    if (op.size() != 1) fail("operator must hold exactly one of plap, pucci");
    if (op.contains("plap")) {
        only_keys(op["plap"], {"p"}, "operator.plap");
        const double p = get_number(op["plap"], "p", "operator.plap");
        if (!(p > 1.0)) fail("operator.plap.p must exceed 1");
        cfg.op = OperatorSpec::plap(p);
    } else {
        only_keys(op["pucci"], {"Lambda"}, "operator.pucci");
        const double L = get_number(op["pucci"], "Lambda", "operator.pucci");
        if (!(L >= 1.0)) fail("operator.pucci.Lambda must be >= 1");
        cfg.op = OperatorSpec::pucci(L);
    }

    const json& geo = require(j, "geometry", "config");
    only_keys(geo, {"N", "R"}, "geometry");
    const json& N = require(geo, "N", "geometry");
    if (!N.is_number_integer() || N.get<long long>() < 1) fail("geometry.N must be an integer >= 1");
    cfg.N = static_cast<int>(N.get<long long>());
    cfg.R = get_number(geo, "R", "geometry");
    if (!(cfg.R > 0.0)) fail("geometry.R must be positive");

    if (j.contains("scan")) {
        const json& s = j["scan"];
        only_keys(s, {"c_min", "c_max", "points", "log_spacing", "cluster_levels"}, "scan");
        ScanSpec sc;
        sc.c_min = get_number(s, "c_min", "scan");
        sc.c_max = get_number(s, "c_max", "scan");
        sc.points = count_or(s, "points", 400, "scan");
        if (s.contains("log_spacing")) {
            if (!s["log_spacing"].is_boolean()) fail("scan.log_spacing must be a boolean");
            sc.log_spacing = s["log_spacing"].get<bool>();
        }
        sc.cluster_levels = static_cast<int>(count_or(s, "cluster_levels", 0, "scan"));
        cfg.scan = sc;
    }

    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        only_keys(t, {"ode", "event", "quad", "check", "stationarity"}, "tolerances");
        cfg.tol.ode = number_or(t, "ode", cfg.tol.ode, "tolerances");
        cfg.tol.event = number_or(t, "event", cfg.tol.event, "tolerances");
        cfg.tol.quad = number_or(t, "quad", cfg.tol.quad, "tolerances");
        cfg.tol.check = number_or(t, "check", cfg.tol.check, "tolerances");
        cfg.tol.stationarity = number_or(t, "stationarity", cfg.tol.stationarity, "tolerances");
        for (double v : {cfg.tol.ode, cfg.tol.event, cfg.tol.quad, cfg.tol.check, cfg.tol.stationarity}) {
            if (!(v > 0.0)) fail("tolerances must be positive");
        }
    }

    if (j.contains("outputs")) {
        only_keys(j["outputs"], {"dir"}, "outputs");
        const json& d = require(j["outputs"], "dir", "outputs");
        if (!d.is_string()) fail("outputs.dir must be a string");
        cfg.out_dir = d.get<std::string>();
    }

    if (j.contains("minimize")) {
        const json& m = j["minimize"];
        only_keys(m, {"lambda", "K", "cells", "grading"}, "minimize");
        MinimizeSpec ms;
        ms.lambda = get_number(m, "lambda", "minimize");
        ms.K = count_or(m, "K", ms.K, "minimize");
        ms.cells = count_or(m, "cells", ms.cells, "minimize");
        ms.grading = number_or(m, "grading", ms.grading, "minimize");
        if (!(ms.lambda >= 0.0) || ms.K < 1 || ms.cells < 2 || !(ms.grading >= 1.0)) {
            fail("minimize needs lambda >= 0, K >= 1, cells >= 2, grading >= 1");
        }
        cfg.minimize = ms;
    }

    if (j.contains("lambda_star")) {
        const json& ls = j["lambda_star"];
        if (!ls.is_array()) fail("lambda_star must be an array of numbers");
        for (const json& v : ls) {
            if (!v.is_number() || !(v.get<double>() > 0.0)) fail("lambda_star entries must be positive numbers");
            cfg.lambda_star.push_back(v.get<double>());
        }
    }
    cfg.zero_count = count_or(j, "zero_count", cfg.zero_count, "config");
    if (cfg.zero_count < 1) fail("zero_count must be >= 1");

    if (j.contains("diagram")) {
        if (!j["diagram"].is_string()) fail("diagram must be a path string");
        cfg.diagram_path = j["diagram"].get<std::string>();
        if (!std::filesystem::exists(cfg.diagram_path)) fail("diagram file " + cfg.diagram_path + " does not exist");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot read config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

std::uint64_t config_hash(const json& j) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json number(double v) {
    if (std::isfinite(v)) return v;
    return fmt(v);
}

json header(const RunConfig& cfg, const std::string& command) {
    return {{"toolkit_version", kToolkitVersion}, {"config_hash", hex(cfg.hash)}, {"command", command}};
}

json to_json(const LimitEstimate& e) {
    return {{"L_minus", number(e.L_minus)},
            {"L_plus", number(e.L_plus)},
            {"classification", to_string(e.classification)},
            {"exponent", e.exponent},
            {"window", {number(e.window.empty() ? NAN : e.window.front()), number(e.window.empty() ? NAN : e.window.back())}},
            {"estimate", true}};
}

json to_json(const ZeroSequence& z) {
    return {{"alphas", z.alphas},
            {"count", z.count},
            {"direction", z.direction == Direction::Zero ? "zero" : "infinity"}};
}

json to_json(const ThresholdReport& r) {
    json seq = json::array();
    for (const LambdaTerm& t : r.sequence) {
        seq.push_back({{"gamma", t.gamma},
                       {"delta", t.delta},
                       {"C1", t.C1},
                       {"C2", t.C2},
                       {"Fbar", t.Fbar},
                       {"lambda", number(t.lambda)}});
    }
    json out = {{"operator", r.op.describe()},
                {"direction", r.ell == Direction::Zero ? "zero" : "infinity"},
                {"N", r.N},
                {"R", r.R},
                {"f0", r.f0},
                {"reduced", r.reduced},
                {"limits", to_json(r.limits)},
                {"limits_Lambda", to_json(r.limits_Lambda)},
                {"lambda_under_plap", number(r.lambda_under_plap)},
                {"lambda_under_pucci", number(r.lambda_under_pucci)},
                {"lambda_under", number(r.lambda_under)},
                {"formula_plap", ThresholdReport::formula_plap},
                {"formula_pucci", ThresholdReport::formula_pucci},
                {"existence_available", r.existence_available},
                {"ordering_ok", r.ordering_ok}};
    if (r.reduced) out["reduction_note"] = r.reduction_note;
    if (r.existence_available) {
        out["zeros"] = to_json(r.zeros);
        out["gammas"] = r.gammas;
        out["M"] = number(r.M);
        out["formula_lambda_n"] = ThresholdReport::formula_lambda_n;
        out["lambda_n"] = seq;
        out["lambda_bar"] = {{"value", number(r.lambda_bar.value)},
                             {"monotone", r.lambda_bar.monotone},
                             {"window", r.lambda_bar.window}};
    } else {
        out["existence_note"] = r.existence_note;
    }
    return out;
}

json primitive_samples(const PrimitiveCalculus& pc, double s_max, std::size_t count) {
    json rows = json::array();
    for (std::size_t i = 1; i <= count; ++i) {
        const double s = s_max * static_cast<double>(i) / static_cast<double>(count);
        const auto v = pc.values(s);
        rows.push_back({{"s", s},
                        {"F", v.F},
                        {"Fbar", v.F - v.min_F},
                        {"F_Lambda", v.F_Lambda},
                        {"Fbar_Lambda", v.F_Lambda - v.min_F_Lambda}});
    }
    return rows;
}

json to_json(const ShootResult& r, std::size_t max_trajectory) {
    json out = {{"outcome", to_string(r.outcome)},
                {"c", r.c},
                {"p", r.p},
                {"N", r.N},
                {"lambda_shoot", r.lambda_shoot},
                {"rho", number(r.rho)},
                {"r_turn", number(r.r_turn)},
                {"v_turn", number(r.v_turn)},
                {"r_end", r.r_end},
                {"rho_error_estimate", number(r.rho_error_estimate)},
                {"steps", r.steps},
                {"q_sign_changes", r.q_sign_changes},
                {"message", r.message}};
    std::vector<TrajectorySample> t = r.trajectory;
    detail::thin(t, max_trajectory);
    json rows = json::array();
    for (const TrajectorySample& s : t) rows.push_back({s.r, s.v, s.dv, s.E});
    out["trajectory_columns"] = {"r", "v", "dv", "E"};
    out["trajectory"] = rows;
    if (r.diag.computed) {
        out["diagnostics"] = {{"energy_residual_max", number(r.diag.energy_residual_max)},
                              {"F_at_max_ok", r.diag.F_at_max_ok},
                              {"area_condition_ok", r.diag.area_condition_ok},
                              {"lower_bound", number(r.diag.lower_bound)},
                              {"lower_bound_slack", number(r.diag.lower_bound_slack)}};
    }
    return out;
}

json to_json(const DiagramSummary& s) {
    return {{"points", s.points},
            {"hit_zero", s.hits},
            {"stalled", s.stalled},
            {"bounced", s.bounced},
            {"horizon_exceeded", s.horizon},
            {"branches", s.branches},
            {"sign_violations", s.sign_violations},
            {"area_violations", s.area_violations},
            {"bound_violations", s.bound_violations},
            {"worst_residual", number(s.worst_residual)}};
}

json to_json(const Crossing& c) {
    return {{"lambda_star", c.lambda_star},
            {"c", c.point.c},
            {"lambda", number(c.point.lambda)},
            {"zero_interval_index", c.point.zero_interval_index},
            {"refined", c.refined},
            {"lower_bound", number(c.point.lower_bound)},
            {"F_ok", c.point.F_ok},
            {"area_ok", c.point.area_ok},
            {"bound_ok", c.point.bound_ok}};
}

json to_json(const SequenceResult& s) {
    json items = json::array();
    for (const SequenceItem& it : s.items) {
        items.push_back({{"n", it.n},
                         {"alpha_n", it.alpha_n},
                         {"sup_norm", it.sup_norm},
                         {"energy", it.energy},
                         {"residual", it.residual},
                         {"interval_index", it.interval_index},
                         {"trivial", it.trivial},
                         {"converged", it.converged},
                         {"r", it.u.grid.r},
                         {"u", it.u.u}});
    }
    return {{"items", items}, {"all_trivial", s.all_trivial}, {"trend_toward_limit", s.trend_toward_limit}};
}

std::string diagram_csv(const BifurcationDiagram& d) {
    const bool pucci = d.config.op.kind == OperatorSpec::Kind::Pucci;
    std::ostringstream os;
    os << "c,outcome,rho,lambda,F_c,Fbar_c,lower_bound,energy_residual,area_ok,zero_interval_index";
    if (pucci) os << ",q_sign_changes";
    os << '\n';
    for (const DiagramPoint& p : d.points) {
        os << fmt(p.c) << ',' << to_string(p.outcome) << ',' << fmt(p.rho) << ',' << fmt(p.lambda) << ','
           << fmt(p.F_c) << ',' << fmt(p.Fbar_c) << ',' << fmt(p.lower_bound) << ',' << fmt(p.energy_residual)
           << ',' << (p.area_ok ? 1 : 0) << ',' << p.zero_interval_index;
        if (pucci) os << ',' << p.q_sign_changes;
        os << '\n';
    }
    return os.str();
}

std::string sequence_csv(const SequenceResult& s) {
    std::ostringstream os;
    os << "n,alpha_n,sup_norm,energy,interval_index\n";
    for (const SequenceItem& it : s.items) {
        os << it.n << ',' << fmt(it.alpha_n) << ',' << fmt(it.sup_norm) << ',' << fmt(it.energy) << ','
           << it.interval_index << '\n';
    }
    return os.str();
}

std::vector<CsvPoint> read_diagram_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot read diagram " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("c,outcome,rho,lambda", 0) != 0) {
        fail("diagram " + path + " lacks the expected header");
    }
    std::vector<CsvPoint> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        if (cols.size() < 4) fail("diagram " + path + " line " + std::to_string(lineno) + " is short");
        try {
            out.push_back({std::stod(cols[0]), cols[1], std::stod(cols[3])});
        } catch (const std::exception&) {
            fail("diagram " + path + " line " + std::to_string(lineno) + " is not numeric");
        }
    }
    return out;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::DomainError, "cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw Error(ErrorCode::DomainError, "write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, target);
}

}  // namespace oscilla::io
