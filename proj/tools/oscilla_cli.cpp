#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oscilla/diagram.hpp"
#include "oscilla/error.hpp"
#include "oscilla/io.hpp"
#include "oscilla/pucci.hpp"
#include "oscilla/shoot.hpp"
#include "oscilla/thresholds.hpp"
#include "oscilla/variational.hpp"

using namespace oscilla;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitComputation = 3;
constexpr int kExitProperty = 4;

struct Flags {
    std::string config;
    std::string out;
    std::vector<double> lambda_star;
    std::optional<std::size_t> points;
    std::uint64_t seed = 0;
    std::optional<double> tol_ode;
    unsigned threads = 1;
    std::optional<double> c;
    double lambda = 1.0;
    std::string diagram;
};

io::RunConfig load(const Flags& fl) {
    io::RunConfig cfg = io::load_config(fl.config);
    if (!fl.out.empty()) cfg.out_dir = fl.out;
    if (fl.tol_ode) {
        if (!(*fl.tol_ode > 0.0)) throw Error(ErrorCode::ConfigError, "--tol-ode must be positive");
        cfg.tol.ode = *fl.tol_ode;
    }
    if (fl.points) {
        if (!cfg.scan) throw Error(ErrorCode::ConfigError, "--points needs a scan section in the config");
        cfg.scan->points = *fl.points;
    }
    if (!fl.lambda_star.empty()) cfg.lambda_star = fl.lambda_star;
    if (!fl.diagram.empty()) {
        if (!std::filesystem::exists(fl.diagram)) {
            throw Error(ErrorCode::ConfigError, "diagram file " + fl.diagram + " does not exist");
        }
        cfg.diagram_path = fl.diagram;
    }
    return cfg;
}

double exponent(const OperatorSpec& op) { return op.kind == OperatorSpec::Kind::PLaplacian ? op.p : 2.0; }

double lambda_param(const OperatorSpec& op) { return op.kind == OperatorSpec::Kind::Pucci ? op.Lambda : 1.0; }

std::string out_path(const io::RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

json with_header(const io::RunConfig& cfg, const Flags& fl, const std::string& command) {
    json j = io::header(cfg, command);
    j["seed"] = fl.seed;
    j["nonlinearity"] = cfg.f.describe();
    return j;
}

AnalyzeOptions analyze_options(const io::RunConfig& cfg) {
    AnalyzeOptions o;
    o.zero_count = cfg.zero_count;
    o.tol_quad = cfg.tol.quad;
    return o;
}

ZeroSequence zeros_or_empty(const Nonlinearity& f, std::size_t count) {
    try {
        return find_zeros(f, count);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoZerosFound) throw;
        ZeroSequence z;
        z.direction = f.direction();
        return z;
    }
}

int cmd_analyze(const Flags& fl) {
    const io::RunConfig cfg = load(fl);
    const ThresholdReport rep = analyze(cfg.f, cfg.op, cfg.N, cfg.R, analyze_options(cfg));
    PrimitiveCalculus pc(cfg.f, exponent(cfg.op), lambda_param(cfg.op), cfg.tol.quad);
    double s_max = 10.0;
    if (rep.existence_available && !rep.zeros.alphas.empty()) {
        s_max = rep.ell == Direction::Infinity ? rep.zeros.alphas.back() : rep.zeros.alphas.front();
    }
    json j = with_header(cfg, fl, "analyze");
    j["report"] = io::to_json(rep);
    j["samples"] = io::primitive_samples(pc, s_max, 64);
    io::write_atomic(out_path(cfg, "report.json"), j.dump(2) + "\n");
    std::cout << "lambda_under " << io::fmt(rep.lambda_under) << " (" << to_string(rep.limits.classification)
              << ")";
    if (rep.existence_available) std::cout << ", lambda_bar " << io::fmt(rep.lambda_bar.value);
    std::cout << "\n";
    if (!rep.ordering_ok) {
        std::cerr << "analyze: lambda_under exceeds lambda_bar\n";
        return kExitProperty;
    }
    return kExitOk;
}

int cmd_shoot(const Flags& fl) {
    const io::RunConfig cfg = load(fl);
    if (cfg.op.kind != OperatorSpec::Kind::PLaplacian) {
        throw Error(ErrorCode::ConfigError, "shoot needs a plap operator; use pucci-shoot");
    }
    if (!fl.c) throw Error(ErrorCode::ConfigError, "shoot needs --c");
    ShootConfig sc;
    sc.p = cfg.op.p;
    sc.N = cfg.N;
    sc.c = *fl.c;
    sc.lambda_shoot = fl.lambda;
    sc.tol_ode = cfg.tol.ode;
    sc.event_tol = cfg.tol.event;
    ShootResult res = shoot(sc, cfg.f);
    bool violated = false;
    json j = with_header(cfg, fl, "shoot");
    if (res.outcome == Outcome::HitZero) {
        PrimitiveCalculus pc(cfg.f, sc.p, 1.0, cfg.tol.quad);
        res.diag = check_necessary_conditions(res, pc, sc.p, cfg.R, cfg.tol.check);
        j["lambda_on_ball"] = rescale_to_ball(res, cfg.R, sc.p);
        violated = !res.diag.F_at_max_ok || !res.diag.area_condition_ok ||
                   res.diag.lower_bound_slack < -cfg.tol.check;
    }
    j["result"] = io::to_json(res);
    io::write_atomic(out_path(cfg, "shoot.json"), j.dump(2) + "\n");
    std::cout << to_string(res.outcome) << " rho " << io::fmt(res.rho) << "\n";
    if (!res.message.empty()) std::cout << res.message << "\n";
    return violated ? kExitProperty : kExitOk;
}

int cmd_pucci_shoot(const Flags& fl) {
    const io::RunConfig cfg = load(fl);
    if (cfg.op.kind != OperatorSpec::Kind::Pucci) throw Error(ErrorCode::ConfigError, "pucci-shoot needs a pucci operator");
    if (!fl.c) throw Error(ErrorCode::ConfigError, "pucci-shoot needs --c");
    PucciShootConfig sc;
    sc.Lambda = cfg.op.Lambda;
    sc.N = cfg.N;
    sc.c = *fl.c;
    sc.lambda_shoot = fl.lambda;
    sc.tol_ode = cfg.tol.ode;
    sc.event_tol = cfg.tol.event;
    const ShootResult res = pucci_shoot(sc, cfg.f);
    bool violated = false;
    json j = with_header(cfg, fl, "pucci-shoot");
    if (res.outcome == Outcome::HitZero) {
        PrimitiveCalculus pc(cfg.f, 2.0, sc.Lambda, cfg.tol.quad);
        const PucciCheck chk = pucci_inequality_check(res, pc, res.lambda_shoot, cfg.R, cfg.tol.check);
        j["lambda_on_ball"] = pucci_rescale(res, cfg.R);
        j["inequality_check"] = {{"min_slack", chk.min_slack},
                                 {"lower_bound", io::number(chk.lower_bound)},
                                 {"lower_bound_slack", io::number(chk.lower_bound_slack)},
                                 {"ok", chk.ok}};
        violated = !chk.ok;
    }
    j["result"] = io::to_json(res);
    io::write_atomic(out_path(cfg, "pucci_shoot.json"), j.dump(2) + "\n");
    std::cout << to_string(res.outcome) << " rho " << io::fmt(res.rho) << " q_sign_changes " << res.q_sign_changes
              << "\n";
    if (!res.message.empty()) std::cout << res.message << "\n";
    return violated ? kExitProperty : kExitOk;
}

int cmd_diagram(const Flags& fl) {
    const io::RunConfig cfg = load(fl);
    if (!cfg.scan) throw Error(ErrorCode::ConfigError, "diagram needs a scan section");
    std::vector<double> grid;
    try {
        grid = make_c_grid(cfg.scan->c_min, cfg.scan->c_max, cfg.scan->points, cfg.scan->log_spacing);
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, std::string("scan: ") + e.what());
    }
    const ZeroSequence zeros = zeros_or_empty(cfg.f, cfg.zero_count);
    if (cfg.scan->cluster_levels > 0) grid = cluster_near_zeros(std::move(grid), zeros, cfg.scan->cluster_levels);

    PrimitiveCalculus pc(cfg.f, exponent(cfg.op), lambda_param(cfg.op), cfg.tol.quad);
    DiagramConfig dc;
    dc.op = cfg.op;
    dc.N = cfg.N;
    dc.R = cfg.R;
    dc.tol_ode = cfg.tol.ode;
    dc.event_tol = cfg.tol.event;
    dc.check_tol = cfg.tol.check;
    dc.threads = fl.threads;
    const auto t0 = std::chrono::steady_clock::now();
    const BifurcationDiagram d = diagram(cfg.f, pc, dc, grid, zeros);
    const DiagramSummary s = summarize(d);

    json j = with_header(cfg, fl, "diagram");
    j["summary"] = io::to_json(s);
    j["zeros"] = io::to_json(zeros);
    json branches = json::array();
    for (const Branch& b : d.branches) {
        branches.push_back({{"c_first", d.points[b.first].c},
                            {"c_last", d.points[b.last].c},
                            {"zero_interval_index", b.zero_interval_index},
                            {"lambda_min", b.lambda_min},
                            {"lambda_max", b.lambda_max}});
    }
    j["branches"] = branches;
    json crossings = json::array();
    std::size_t crossing_violations = 0;
    for (double ls : cfg.lambda_star) {
        const std::vector<Crossing> cr = find_crossings(d, cfg.f, pc, ls);
        json list = json::array();
        std::vector<int> intervals;
        for (const Crossing& c : cr) {
            list.push_back(io::to_json(c));
            if (!c.point.F_ok || !c.point.area_ok || !c.point.bound_ok) ++crossing_violations;
            if (std::find(intervals.begin(), intervals.end(), c.point.zero_interval_index) == intervals.end()) {
                intervals.push_back(c.point.zero_interval_index);
            }
        }
        crossings.push_back({{"lambda_star", ls},
                             {"count", cr.size()},
                             {"distinct_intervals", intervals.size()},
                             {"solutions", list}});
    }
    j["crossings"] = crossings;
    const bool pass = s.sign_violations == 0 && s.area_violations == 0 && s.bound_violations == 0 &&
                      crossing_violations == 0;
    j["checks"] = {{"sign_condition", s.sign_violations == 0},
                   {"area_condition", s.area_violations == 0},
                   {"per_solution_bound", s.bound_violations == 0},
                   {"crossings", crossing_violations == 0},
                   {"pass", pass}};
    j["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    io::write_atomic(out_path(cfg, "diagram.csv"), io::diagram_csv(d));
    io::write_atomic(out_path(cfg, "diagram_summary.json"), j.dump(2) + "\n");
    std::cout << s.points << " points, " << s.hits << " hit_zero, " << s.branches << " branches";
    for (const json& c : crossings) {
        std::cout << "; lambda* " << io::fmt(c["lambda_star"].get<double>()) << ": " << c["count"].get<std::size_t>()
                  << " solutions";
    }
    std::cout << "\n";
    return pass ? kExitOk : kExitProperty;
}

int cmd_minimize(const Flags& fl) {
    const io::RunConfig cfg = load(fl);
    if (!cfg.minimize) throw Error(ErrorCode::ConfigError, "minimize needs a minimize section");
    if (cfg.op.kind != OperatorSpec::Kind::PLaplacian) throw Error(ErrorCode::ConfigError, "minimize needs a plap operator");
    const io::MinimizeSpec& ms = *cfg.minimize;
    const ZeroSequence zeros = find_zeros(cfg.f, std::max(ms.K, cfg.zero_count));
    const RadialGrid grid = RadialGrid::graded(cfg.R, ms.cells, ms.grading);
    const Potential pot = Potential::p_laplacian(cfg.op.p);
    MinimizeOptions mo;
    mo.tol_stat = cfg.tol.stationarity;
    mo.threads = fl.threads;
    const SequenceResult seq = run_sequence(cfg.f, pot, ms.lambda, zeros, grid, cfg.N, ms.K, mo);
    bool violated = false;
    for (const SequenceItem& it : seq.items) {
        for (double v : it.u.u) violated = violated || v < 0.0 || v > it.alpha_n;
    }
    json j = with_header(cfg, fl, "minimize");
    j["lambda"] = ms.lambda;
    j["sequence"] = io::to_json(seq);
    j["box_constraint_ok"] = !violated;
    io::write_atomic(out_path(cfg, "sequence.csv"), io::sequence_csv(seq));
    io::write_atomic(out_path(cfg, "minimize.json"), j.dump(2) + "\n");
    for (const SequenceItem& it : seq.items) {
        std::cout << "n " << it.n << " sup " << io::fmt(it.sup_norm) << " energy " << io::fmt(it.energy) << "\n";
    }
    return violated ? kExitProperty : kExitOk;
}

int cmd_certify(const Flags& fl) {
    const io::RunConfig cfg = load(fl);
    const ThresholdReport rep = analyze(cfg.f, cfg.op, cfg.N, cfg.R, analyze_options(cfg));
    const bool plap = cfg.op.kind == OperatorSpec::Kind::PLaplacian;
    const LimitEstimate& lim = plap ? rep.limits : rep.limits_Lambda;
    json cert = {{"operator", cfg.op.describe()},
                 {"ell", rep.ell == Direction::Zero ? "zero" : "infinity"},
                 {"L_minus", io::number(lim.L_minus)},
                 {"L_plus", io::number(lim.L_plus)},
                 {"limits_are_estimates", true},
                 {"classification", to_string(lim.classification)},
                 {"lambda_under", io::number(rep.lambda_under)},
                 {"formula", plap ? ThresholdReport::formula_plap : ThresholdReport::formula_pucci},
                 {"statement", "no lambda in [0, lambda_under) is a bifurcation point from ell"},
                 {"caveat", "limits are numerical estimates"}};
    bool violated = false;
    if (!cfg.diagram_path.empty()) {
        const std::vector<io::CsvPoint> pts = io::read_diagram_csv(cfg.diagram_path);
        PrimitiveCalculus pc(cfg.f, exponent(cfg.op), lambda_param(cfg.op), cfg.tol.quad);
        std::size_t solutions = 0, bound_fail = 0, below_under = 0;
        double min_lambda = INFINITY, worst_slack = INFINITY;
        for (const io::CsvPoint& pt : pts) {
            if (pt.outcome != to_string(Outcome::HitZero)) continue;
            ++solutions;
            const double bound = plap ? per_solution_lower_bound(pc, pt.c, cfg.op.p, cfg.R)
                                      : per_solution_lower_bound_pucci(pc, pt.c, cfg.R);
            const double slack = pt.lambda - bound;
            worst_slack = std::min(worst_slack, slack);
            if (slack < -cfg.tol.check * std::max(1.0, std::abs(bound))) ++bound_fail;
            if (pt.lambda < rep.lambda_under - cfg.tol.check * std::max(1.0, rep.lambda_under)) ++below_under;
            min_lambda = std::min(min_lambda, pt.lambda);
        }
        violated = bound_fail > 0;
        cert["empirical"] = {{"diagram", cfg.diagram_path},
                             {"solutions", solutions},
                             {"min_lambda", io::number(min_lambda)},
                             {"per_solution_bound_failures", bound_fail},
                             {"worst_bound_slack", io::number(worst_slack)},
                             {"below_lambda_under", below_under},
                             {"pass", !violated}};
    }
    json j = with_header(cfg, fl, "certify");
    j["certificate"] = cert;
    io::write_atomic(out_path(cfg, "certificate.json"), j.dump(2) + "\n");
    std::cout << "lambda_under " << io::fmt(rep.lambda_under) << "\n";
    return violated ? kExitProperty : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial solvers and threshold estimates for -Delta_p u = lambda f(u) with oscillating f"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    Flags fl;
    app.add_option("--config", fl.config, "JSON run configuration")->required();
    app.add_option("--out", fl.out, "output directory (overrides outputs.dir)");
    app.add_option("--lambda-star", fl.lambda_star, "lambda* values for crossing counts")->delimiter(',');
    app.add_option("--points", fl.points, "scan points (overrides scan.points)");
    app.add_option("--seed", fl.seed, "recorded in every report");
    app.add_option("--tol-ode", fl.tol_ode, "ODE tolerance");
    app.add_option("--threads", fl.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--c", fl.c, "initial height for shoot / pucci-shoot");
    app.add_option("--lambda", fl.lambda, "lambda used while shooting");
    app.add_option("--diagram", fl.diagram, "diagram CSV for certify");

    std::string command;
    for (const char* name : {"analyze", "shoot", "pucci-shoot", "diagram", "minimize", "certify"}) {
        app.add_subcommand(name)->callback([&command, name] { command = name; });
    }
    app.get_subcommand("analyze")->description("limits, thresholds and the existence sequence");
    app.get_subcommand("shoot")->description("one p-Laplacian shoot");
    app.get_subcommand("pucci-shoot")->description("one Pucci shoot");
    app.get_subcommand("diagram")->description("bifurcation diagram scan and crossings");
    app.get_subcommand("minimize")->description("truncated-energy minimizers for n = 1..K");
    app.get_subcommand("certify")->description("nonexistence certificate, checked against a diagram");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (command == "analyze") return cmd_analyze(fl);
        if (command == "shoot") return cmd_shoot(fl);
        if (command == "pucci-shoot") return cmd_pucci_shoot(fl);
        if (command == "diagram") return cmd_diagram(fl);
        if (command == "minimize") return cmd_minimize(fl);
        if (command == "certify") return cmd_certify(fl);
    } catch (const Error& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::EmptyGrid ? kExitConfig
                                                                                     : kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return kExitComputation;
    }
    return kExitConfig;
}
