#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msh/harness.hpp"

using namespace msh;

namespace {

const char* kMinimalConfig = R"json({
  "kind": "cz",
  "coefficient": {"expr": "(2+sin(2*pi*y1))*(2+cos(2*pi*y2))", "lambda": 0.111},
  "family": {"eps1": [0.0625, 0.03125, 0.015625], "rules": ["eps1", "eps1*(1/3+sqrt(eps1))"]},
  "f": {"preset": "smooth"},
  "p": [2, 4]
})json";

}  // namespace

TEST_CASE("config parsing applies defaults and validates") {
    SweepConfig cfg = parse_config_text(kMinimalConfig);
    CHECK(cfg.name == "sweep");
    CHECK(cfg.dim == 1);
    CHECK(cfg.grid_factor == 16.0);
    CHECK(cfg.p_list == std::vector<double>{2.0, 4.0});
    CHECK(cfg.family.eps1.size() == 3);

    CHECK_THROWS_AS(parse_config_text("{\"kindd\": \"cz\"}"), SchemaError);
    CHECK_THROWS_AS(parse_config_text("{\"kind\": \"bogus\"}"), SchemaError);
    CHECK_THROWS_AS(parse_config_text("not json"), SchemaError);
    CHECK_THROWS_AS(parse_config_text("{\"p\": [1]}"), SchemaError);
    CHECK_THROWS_AS(
        parse_config_text("{\"coefficient\": {\"expr\": \"sin(3.5*y1)\"}}"), SchemaError);
    try {
        parse_config_text("{\"coefficient\": {\"expr\": \"1\", \"lambd\": 1}}");
        CHECK(false);
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("coefficient.lambd") != std::string::npos);
    }
}

TEST_CASE("config round trip is the identity on semantic content") {
    SweepConfig a = parse_config_text(kMinimalConfig);
    std::string emitted = emit_config(a);
    SweepConfig b = parse_config_text(emitted);
    CHECK(emit_config(b) == emitted);
    CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("cz sweep: constant coefficient R is flat, verdict PASS") {
    SweepConfig cfg;
    cfg.kind = "cz";
    cfg.coefficient.expr = "2";
    cfg.coefficient.lambda = 0.5;
    cfg.family.eps1 = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
    cfg.family.rules = {"eps1"};
    cfg.f.preset = "smooth";
    cfg.p_list = {2.0};
    ExperimentReport rep = run_cz_sweep(cfg, 4);
    CHECK(rep.pass);
    REQUIRE(rep.records.size() == 4);
    double r0 = rep.records[0].values[0].second;
    for (const auto& rec : rep.records) {
        REQUIRE(rec.error.empty());
        CHECK(rec.values[0].second == doctest::Approx(r0).epsilon(1e-6));
    }
    CHECK(rep.csv_name == "rates.csv");
}

TEST_CASE("cz sweep rejects p outside (1, infinity)") {
    SweepConfig cfg;
    cfg.kind = "cz";
    cfg.coefficient.expr = "2";
    cfg.family.eps1 = {0.05, 0.025, 0.0125};
    cfg.family.rules = {"eps1"};
    cfg.p_list = {1.0};
    CHECK_THROWS_AS(run_cz_sweep(cfg, 1), InvalidInput);
}

TEST_CASE("sweep isolation: an unresolvable instance is recorded, not fatal") {
    SweepConfig cfg;
    cfg.kind = "cz";
    cfg.coefficient.expr = "2+sin(2*pi*y1)";
    cfg.coefficient.lambda = 1.0 / 3.0;
    cfg.family.eps1 = {0.05, 0.025, 0.0125, 1e-7};  // last exceeds the budget
    cfg.family.rules = {"eps1"};
    cfg.max_nodes = 200000;
    cfg.p_list = {2.0};
    ExperimentReport rep = run_cz_sweep(cfg, 2);
    REQUIRE(rep.records.size() == 4);
    CHECK(rep.records[3].error.find("budget") != std::string::npos);
    CHECK(rep.records[0].error.empty());
}

TEST_CASE("lipschitz profile: harmonic (affine) solution gives a flat profile") {
    SweepConfig cfg;
    cfg.kind = "lipschitz";
    cfg.coefficient.expr = "1";
    cfg.coefficient.lambda = 1.0;
    cfg.family.eps1 = {0.05, 0.025, 0.0125};
    cfg.family.rules = {"eps1", "eps1*(1/3+sqrt(eps1))"};
    // F = 0 with zero boundary gives u = 0; drive through f instead is not
    // part of this op, so use the boundary-data route: A=1, F=0 makes u
    // affine equal to zero -- instead check the sub-mean-value property on a
    // two-scale instance with F = 0 via nonzero g is not exposed here, so we
    // assert the flat-profile property for the F=1 constant-coefficient case
    // where |grad u| = |c - x| is explicit.
    cfg.F.expr = "1";
    cfg.lip.alpha = 0.25;
    cfg.lip.ladder = 8;
    ExperimentReport rep = run_lipschitz(cfg, 3);
    CHECK(rep.pass);
    for (const auto& rec : rep.records) CHECK(rec.error.empty());
    CHECK(rep.csv_name == "profile.csv");
}

TEST_CASE("lipschitz mesoscopic window for three scales") {
    SweepConfig cfg;
    cfg.kind = "lipschitz";
    cfg.coefficient.expr = "2+0.3*sin(2*pi*y1)+0.3*cos(2*pi*y2)+0.3*sin(2*pi*y3)";
    cfg.coefficient.lambda = 0.3;
    cfg.family.eps1 = {0.1};
    cfg.family.rules = {"eps1", "eps1*0.41", "eps1*0.173"};
    cfg.F.expr = "1";
    cfg.lip.alpha = 0.5;  // alpha in (0, 1/(n-1)] with n=3
    cfg.lip.delta_index = 3;
    cfg.lip.ladder = 6;
    cfg.grid_factor = 16;
    ExperimentReport rep = run_lipschitz(cfg, 1);
    REQUIRE(rep.records.size() == 1);
    REQUIRE(rep.records[0].error.empty());
    double q = 0, rmin = 0, rmax = 0;
    for (const auto& [k, v] : rep.records[0].values) {
        if (k == "q") q = v;
        if (k == "r_min") rmin = v;
        if (k == "r_max") rmax = v;
    }
    double delta = 0.1 * 0.173;
    CHECK(q >= 1.0);
    CHECK(q <= std::pow(delta, -(3 - 1) * 0.5) + 1e-9);  // q <= delta^{-(n-1)alpha}
    CHECK(rmin == doctest::Approx(q * delta));
    CHECK(rmax == doctest::Approx(std::min(q * std::pow(delta, 0.5), 1.0)));
}

TEST_CASE("quasiperiodic sweep reduces to the periodic one for M=[1]") {
    SweepConfig qp;
    qp.kind = "quasiperiodic";
    qp.qp.B = "2+sin(2*pi*y1)";
    qp.qp.lambda = 1.0 / 3.0;
    qp.qp.M = {{1.0}};
    qp.family.eps1 = {0.05, 0.025, 0.0125};
    qp.f.preset = "smooth";
    qp.p_list = {2.0};
    ExperimentReport rep = run_quasiperiodic(qp, 3);
    CHECK(rep.pass);

    SweepConfig per;
    per.kind = "cz";
    per.coefficient.expr = "2+sin(2*pi*y1)";
    per.coefficient.lambda = 1.0 / 3.0;
    per.family.eps1 = qp.family.eps1;
    per.family.rules = {"eps1"};
    per.f.preset = "smooth";
    per.p_list = {2.0};
    ExperimentReport rep2 = run_cz_sweep(per, 3);
    REQUIRE(rep.records.size() == rep2.records.size());
    for (std::size_t k = 0; k < rep.records.size(); ++k)
        CHECK(rep.records[k].values[0].second ==
              doctest::Approx(rep2.records[k].values[0].second).epsilon(1e-12));
}

TEST_CASE("two-frequency quasiperiodic sweep passes") {
    SweepConfig qp;
    qp.kind = "quasiperiodic";
    qp.qp.B = "2+0.5*sin(2*pi*y1[1])+0.5*cos(2*pi*y1[2])";
    qp.qp.lambda = 1.0 / 3.0;
    qp.qp.M = {{1.0}, {std::sqrt(2.0)}};
    qp.family.eps1 = {0.0625, 0.03125, 0.015625};
    qp.f.preset = "smooth";
    qp.p_list = {2.0};
    ExperimentReport rep = run_quasiperiodic(qp, 3);
    CHECK(rep.pass);
    for (const auto& rec : rep.records) {
        REQUIRE(rec.error.empty());
        REQUIRE(rec.eps.size() == 2);
        CHECK(rec.eps[0] / rec.eps[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("2d sweep instance runs through the same machinery") {
    SweepConfig cfg;
    cfg.kind = "cz";
    cfg.dim = 2;
    cfg.coefficient.expr = "2+0.5*cos(2*pi*y1[1])*cos(2*pi*y1[2])";
    cfg.coefficient.lambda = 0.4;
    cfg.family.eps1 = {0.25, 0.125, 0.0625};
    cfg.family.rules = {"eps1"};
    cfg.f.preset = "smooth";
    cfg.p_list = {2.0};
    cfg.grid_factor = 8;
    ExperimentReport rep = run_cz_sweep(cfg, 3);
    for (const auto& rec : rep.records) {
        REQUIRE(rec.error.empty());
        CHECK(rec.values[0].second > 0.0);
        CHECK(std::isfinite(rec.values[0].second));
    }
}

TEST_CASE("report emission writes report.json and the csv table") {
    SweepConfig cfg;
    cfg.kind = "cz";
    cfg.name = "emit_test";
    cfg.coefficient.expr = "2";
    cfg.family.eps1 = {0.05, 0.025, 0.0125};
    cfg.family.rules = {"eps1"};
    cfg.p_list = {2.0};
    ExperimentReport rep = run_cz_sweep(cfg, 1);
    std::string dir = "harness_emit_test_out";
    emit_report(rep, dir);
    CHECK(std::filesystem::exists(dir + "/report.json"));
    CHECK(std::filesystem::exists(dir + "/rates.csv"));
    std::ifstream is(dir + "/rates.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header.rfind("idx,eps1", 0) == 0);
    is.close();

    // every record carries the config hash, verdicts come from the numbers
    std::string js = report_to_json(rep, false);
    bool parses = true;
    try {
        auto parsed = nlohmann::json::parse(js);
        parses = parsed.is_object();
    } catch (...) {
        parses = false;
    }
    CHECK(parses);
    CHECK(js.find("\"config_hash\"") != std::string::npos);
    CHECK(js.find("\"verdict\"") != std::string::npos);
    std::string needle = "\"config_hash\": " + std::to_string(rep.config_hash);
    std::size_t count = 0;
    for (std::size_t pos = js.find(needle); pos != std::string::npos;
         pos = js.find(needle, pos + 1))
        ++count;
    CHECK(count == rep.records.size() + 1);
    std::filesystem::remove_all(dir);
}

#ifdef MSHLAB_SOURCE_DIR
TEST_CASE("golden config reproduces the frozen fixture byte for byte") {
    SweepConfig cfg = parse_config(std::string(MSHLAB_SOURCE_DIR) + "/configs/golden.json");
    ExperimentReport rep = run_cz_sweep(cfg, 4);
    std::ifstream fx(std::string(MSHLAB_SOURCE_DIR) + "/tests/fixtures/golden_rates.csv",
                     std::ios::binary);
    REQUIRE(fx.good());
    std::stringstream ss;
    ss << fx.rdbuf();
    CHECK(rep.csv == ss.str());
}
#endif

TEST_CASE("reproducibility: identical config reruns give identical csv bytes") {
    SweepConfig cfg;
    cfg.kind = "cz";
    cfg.coefficient.expr = "(2+sin(2*pi*y1))*(2+cos(2*pi*y2))";
    cfg.coefficient.lambda = 0.111;
    cfg.family.eps1 = {0.05, 0.025, 0.0125};
    cfg.family.rules = {"eps1", "eps1*(1/3+sqrt(eps1))"};
    cfg.f.preset = "step";
    cfg.p_list = {2.0, 4.0};
    cfg.seed = 42;
    ExperimentReport a = run_cz_sweep(cfg, 4);
    ExperimentReport b = run_cz_sweep(cfg, 2);  // thread count must not matter
    CHECK(a.csv == b.csv);
    CHECK(fnv1a(a.csv) == fnv1a(b.csv));
}
