#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oscilla/error.hpp"
#include "oscilla/io.hpp"

using namespace oscilla;
using io::json;

namespace {

json base_config() {
    return json::parse(R"({
        "nonlinearity": {"kind": "power_sin", "r": 1},
        "operator": {"plap": {"p": 2}},
        "geometry": {"N": 1, "R": 1},
        "scan": {"c_min": 0.1, "c_max": 10, "points": 20}
    })");
}

ErrorCode code_of(const json& j) {
    try {
        (void)io::parse_config(j);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::NotApplicable;
}

}  // namespace

TEST_CASE("nonlinearity kinds") {
    CHECK(io::nonlinearity_from_json(json::parse(R"({"kind": "pure_sine"})"))(1.0) == std::sin(1.0));
    const auto t = io::nonlinearity_from_json(json::parse(R"({"kind": "table", "samples": [[0, 0], [1, 2]]})"));
    CHECK(t(0.5) == 1.0);
    const auto r = io::nonlinearity_from_json(json::parse(R"({"kind": "reciprocal_sin", "r": 2})"));
    CHECK(r.direction() == Direction::Zero);
    const auto e = io::nonlinearity_from_json(
        json::parse(R"({"kind": "envelope_sin", "samples": [[0, 1], [5, 2]], "direction": "infinity"})"));
    CHECK(e.kind() == NonlinearityKind::EnvelopeTimesOnePlusSin);
}

TEST_CASE("schema violations are config errors") {
    auto j = base_config();
    CHECK(code_of(j) == ErrorCode::NotApplicable);
    j["nonlinearity"]["r"] = -1;
    CHECK(code_of(j) == ErrorCode::ConfigError);
    j = base_config();
    j["nonlinearity"]["kind"] = "exotic";
    CHECK(code_of(j) == ErrorCode::ConfigError);
    j = base_config();
    j["operator"] = {{"plap", {{"p", 1}}}};
    CHECK(code_of(j) == ErrorCode::ConfigError);
    j = base_config();
    j["geometry"]["N"] = 0;
    CHECK(code_of(j) == ErrorCode::ConfigError);
    j = base_config();
    j["surprise"] = 1;
    CHECK(code_of(j) == ErrorCode::ConfigError);
    j = base_config();
    j["diagram"] = "/nonexistent/diagram.csv";
    CHECK(code_of(j) == ErrorCode::ConfigError);
    j = base_config();
    j["nonlinearity"] = {{"kind", "table"}, {"samples", {{0.5, 1}, {1, 2}}}};
    CHECK(code_of(j) == ErrorCode::ConfigError);
}

TEST_CASE("config hash is canonical") {
    const auto a = json::parse(R"({"b": 1, "a": [1, 2]})");
    const auto b = json::parse(R"({"a": [1, 2], "b": 1})");
    CHECK(io::config_hash(a) == io::config_hash(b));
    CHECK(io::config_hash(a) != io::config_hash(json::parse(R"({"a": [2, 1], "b": 1})")));
    CHECK(io::hex(0xabcULL) == "0000000000000abc");
    // FNV-1a of the empty string is the offset basis.
    CHECK(io::config_hash(json::parse("\"\"")) != 0);
}

TEST_CASE("number formatting") {
    CHECK(io::fmt(0.1) == "0.10000000000000001");
    CHECK(io::fmt(INFINITY) == "inf");
    CHECK(io::number(-INFINITY) == json("-inf"));
    CHECK(io::number(2.5) == json(2.5));
}

TEST_CASE("atomic write and diagram round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "oscilla_io_test";
    std::filesystem::remove_all(dir);
    const std::string path = (dir / "d.csv").string();
    io::write_atomic(path, "c,outcome,rho,lambda\n1,hit_zero,2,3.5\n2,stalled,nan,nan\n");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    const auto pts = io::read_diagram_csv(path);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].lambda == 3.5);
    CHECK(pts[1].outcome == "stalled");
    io::write_atomic(path, "garbage\n");
    CHECK_THROWS_AS((void)io::read_diagram_csv(path), Error);
    std::filesystem::remove_all(dir);
}
