#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "qest/model_io.hpp"
#include "test_util.hpp"

using namespace qest;
using namespace qest::testutil;

namespace {

const char* kMinimalConfig = R"({
  "plant": {"squeezer": {"gamma": 4, "kappas": [4], "chi_re": 0, "chi_im": 0}},
  "cost_row": [[0.2, 0], [-0.2, 0]]
})";

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("parse_model squeezer form") {
    const ModelSpec spec = parse_model(
        R"({"squeezer": {"gamma": 4, "kappas": [4], "chi_re": 1, "chi_im": -0.5}})");
    CHECK(spec.is_squeezer());
    const auto& sq = std::get<SqueezerParams>(spec.model);
    CHECK(sq.gamma == 4.0);
    CHECK(sq.kappas == std::vector<double>{4.0});
    CHECK(sq.chi == Complex{1.0, -0.5});
    CHECK_FALSE(spec.C.has_value());

    const QuantumSystem sys = spec.build(true);
    CHECK(sys.F == ComplexMatrix::from_rows({{-2.0, Complex{-1.0, 0.5}},
                                             {Complex{-1.0, -0.5}, -2.0}}));
}

TEST_CASE("parse_model raw form round-trips the matrices") {
    const ModelSpec spec = parse_model(R"({
      "raw": {
        "F": [[[-2, 0], [0, 0]], [[0, 0], [-2, 0]]],
        "G": [[[-2, 0], [0, 0]], [[0, 0], [-2, 0]]],
        "H": [[[2, 0], [0, 0]], [[0, 0], [2, 0]]],
        "K": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
      },
      "C": [[0.2, 0], [-0.2, 0]]
    })");
    CHECK_FALSE(spec.is_squeezer());
    const QuantumSystem sys = spec.build(true);
    CHECK(sys.F == (-2.0 * ComplexMatrix::identity(2)));
    CHECK(sys.K == ComplexMatrix::identity(2));
    CHECK(sys.C == ComplexMatrix::from_rows({{0.2, -0.2}}));
}

TEST_CASE("parse_model rejections") {
    CHECK_THROWS_AS(parse_model("not json"), ParseError);
    CHECK_THROWS_AS(parse_model(R"({})"), ValidationError);
    CHECK_THROWS_AS(parse_model(R"({"squeezer": {}, "raw": {}})"), ValidationError);
    CHECK_THROWS_AS(parse_model(R"({"squeezer": {"gamma": 4}})"), ValidationError);
    CHECK_THROWS_AS(parse_model(R"({"squeezer": {"gamma": 4, "kappas": [4], "x": 1}})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_model(R"({"squeezer": {"gamma": 4, "kappas": [4]}, "C": [[1]]})"),
                    ValidationError); // malformed complex pair
    try {
        parse_model(R"({"squeezer": {"gamma": 4, "kappas": [4], "bogus_key": 1}})");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }
}

TEST_CASE("parse_config defaults and validation") {
    const RunConfig cfg = parse_config(kMinimalConfig);
    CHECK(cfg.angles.start_deg == 0.0);
    CHECK(cfg.angles.stop_deg == 180.0);
    CHECK(cfg.angles.steps == 181);
    CHECK(cfg.outputs.csv_path == "sweep.csv");
    CHECK_FALSE(cfg.outputs.svg_path.has_value());
    CHECK_FALSE(cfg.controller.has_value());
    CHECK(cfg.effective_cost_row() == ComplexMatrix::from_rows({{0.2, -0.2}}));

    CHECK_THROWS_AS(parse_config(R"({"cost_row": [[1, 0]]})"), ValidationError);
    CHECK_THROWS_AS(
        parse_config(R"({"plant": {"squeezer": {"gamma": 4, "kappas": [4]}},
                         "angles": {"steps": 0}})"),
        ValidationError);
    CHECK_THROWS_AS(
        parse_config(R"({"plant": {"squeezer": {"gamma": 4, "kappas": [4]}},
                         "angles": {"start_deg": 90, "stop_deg": 10}})"),
        ValidationError);
    CHECK_THROWS_AS(
        parse_config(R"({"plant": {"squeezer": {"gamma": 4, "kappas": [4]}},
                         "solver": {"tol": -1}})"),
        ValidationError);
    CHECK_THROWS_AS(
        parse_config(R"({"plant": {"squeezer": {"gamma": 4, "kappas": [4]}}, "zzz": 1})"),
        ValidationError);
}

TEST_CASE("effective cost row falls back to the plant C") {
    const RunConfig cfg = parse_config(R"({
      "plant": {"squeezer": {"gamma": 4, "kappas": [4]}, "C": [[0.5, 0], [0, 0]]}
    })");
    CHECK(cfg.effective_cost_row() == ComplexMatrix::from_rows({{0.5, 0.0}}));

    const RunConfig none = parse_config(R"({
      "plant": {"squeezer": {"gamma": 4, "kappas": [4]}}
    })");
    CHECK_THROWS_AS(none.effective_cost_row(), ValidationError);
}

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.08, 1.0 / 3.0, 1e-17, 180.0, 0.0, 0.15602938073995376}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(40.0) == "40");
}

TEST_CASE("render_csv layout and round-trip") {
    SweepResult res;
    res.rows.push_back({0.0, 0.08, 0.07999999999999997});
    res.rows.push_back({1.0, 1.0 / 3.0, std::nullopt});
    const std::string csv = render_csv(res);

    CHECK(csv == "theta_deg,cost_classical,cost_coherent\n"
                 "0,0.08,0.07999999999999997\n"
                 "1," + format_double(1.0 / 3.0) + ",\n");

    // parse back the second field of row 1 and compare exactly
    const std::size_t line = csv.find('\n') + 1;
    const std::size_t comma = csv.find(',', line);
    const double back = std::strtod(csv.c_str() + comma + 1, nullptr);
    CHECK(back == 0.08);

    CHECK(render_csv(res) == csv); // deterministic
}

TEST_CASE("render_svg draws one polyline per scheme") {
    SweepResult res;
    for (int i = 0; i <= 10; ++i) {
        res.rows.push_back({double(i) * 18.0, 0.08, 0.08});
    }
    const std::string svg = render_svg(res);
    CHECK(svg.find("width=\"800\" height=\"600\"") != std::string::npos);
    CHECK(svg.find("theta (deg)") != std::string::npos);
    CHECK(svg.find(">cost<") != std::string::npos);

    const std::size_t first = svg.find("<polyline");
    const std::size_t second = svg.find("<polyline", first + 1);
    REQUIRE(first != std::string::npos);
    REQUIRE(second != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);

    // identical costs produce coincident polylines
    const auto points_of = [&](std::size_t from) {
        const std::size_t p0 = svg.find("points=\"", from) + 8;
        const std::size_t p1 = svg.find('"', p0);
        return svg.substr(p0, p1 - p0);
    };
    CHECK(points_of(first) == points_of(second));

    SweepResult empty;
    CHECK_THROWS_AS(render_svg(empty), BadParameterError);
}

TEST_CASE("atomic_write_file") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qest_io_test";
    fs::create_directories(dir);
    const std::string path = (dir / "out.txt").string();

    atomic_write_file(path, "hello\n");
    CHECK(slurp(path) == "hello\n");
    CHECK_FALSE(fs::exists(path + ".tmp"));

    CHECK_THROWS_AS(atomic_write_file("/nonexistent_dir_qest/x.txt", "x"), IoError);
    fs::remove_all(dir);
}
