#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oscilla/diagram.hpp"
#include "oscilla/nonlinearity.hpp"
#include "oscilla/pucci.hpp"
#include "oscilla/shoot.hpp"
#include "oscilla/thresholds.hpp"
#include "oscilla/variational.hpp"

namespace oscilla::io {

using json = nlohmann::json;

inline constexpr const char* kToolkitVersion = "1.0.0";

/// {"kind": ..., "r": ..., "samples": [[s, f], ...], "direction": "zero" | "infinity"}.
/// Throws ConfigError on any schema violation.
[[nodiscard]] Nonlinearity nonlinearity_from_json(const json& j);

struct ScanSpec {
    double c_min = 0.0;
    double c_max = 0.0;
    std::size_t points = 0;
    bool log_spacing = false;
    /// Levels of alpha (1 -+ 10^-k) refinement added around each zero (0 = none).
    int cluster_levels = 0;
};

struct Tolerances {
    double ode = 1e-10;
    double event = 1e-14;
    double quad = 1e-10;
    double check = 1e-8;
    double stationarity = 1e-8;
};

struct MinimizeSpec {
    double lambda = 0.0;
    std::size_t K = 3;
    std::size_t cells = 400;
    double grading = 1.0;
};

struct RunConfig {
    json raw;
    std::uint64_t hash = 0;
    Nonlinearity f = Nonlinearity::pure_sine();
    OperatorSpec op;
    int N = 1;
    double R = 1.0;
    std::optional<ScanSpec> scan;
    Tolerances tol;
    std::optional<MinimizeSpec> minimize;
    std::vector<double> lambda_star;
    std::size_t zero_count = 12;
    std::string out_dir = ".";
    std::string diagram_path;  ///< diagram CSV for certify; empty = none
};

/// Validates the whole document before anything is computed.
[[nodiscard]] RunConfig parse_config(const json& j);
/// Reads and parses a config file; unreadable files and bad JSON are ConfigError.
[[nodiscard]] RunConfig load_config(const std::string& path);

/// 64-bit FNV-1a of the canonical (sorted-key) dump.
[[nodiscard]] std::uint64_t config_hash(const json& j);
[[nodiscard]] std::string hex(std::uint64_t v);

/// 17 significant digits; nan/inf spelled out.
[[nodiscard]] std::string fmt(double v);
/// Finite numbers stay numbers, the rest become "inf", "-inf" or "nan".
[[nodiscard]] json number(double v);

/// {"toolkit_version", "config_hash", "command"}.
[[nodiscard]] json header(const RunConfig& cfg, const std::string& command);

[[nodiscard]] json to_json(const LimitEstimate& e);
[[nodiscard]] json to_json(const ZeroSequence& z);
[[nodiscard]] json to_json(const ThresholdReport& r);
/// Primitive samples F, Fbar, F_Lambda at `count` points in (0, s_max].
[[nodiscard]] json primitive_samples(const PrimitiveCalculus& pc, double s_max, std::size_t count);
[[nodiscard]] json to_json(const ShootResult& r, std::size_t max_trajectory = 200);
[[nodiscard]] json to_json(const DiagramSummary& s);
[[nodiscard]] json to_json(const Crossing& c);
[[nodiscard]] json to_json(const SequenceResult& s);

/// One row per grid point; Pucci diagrams get a q_sign_changes column.
[[nodiscard]] std::string diagram_csv(const BifurcationDiagram& d);
[[nodiscard]] std::string sequence_csv(const SequenceResult& s);

struct CsvPoint {
    double c = 0.0;
    std::string outcome;
    double lambda = 0.0;
};
/// Reads (c, outcome, lambda) back from a diagram CSV. Throws ConfigError.
[[nodiscard]] std::vector<CsvPoint> read_diagram_csv(const std::string& path);

/// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace oscilla::io
