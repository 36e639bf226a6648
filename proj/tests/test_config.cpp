#include <doctest.h>

#include <string>

#include "pbmem/config.hpp"

using namespace pbmem;

namespace {

const char* kReference = R"({
  "geometry": {"kind": "spherical", "R_c": 2.0, "R_e": 3.0, "R_outer": 13.0,
               "node_count": 2048},
  "physics": {"eps_s": 80.0, "eps_m": 2.0,
              "ions": [{"charge": 1.0, "concentration": 1.0},
                       {"charge": -1.0, "concentration": 1.0}],
              "lipid_charge": -1.0, "lipid_pool_c": 3.0, "lipid_pool_e": 4.0},
  "source": {"charges": [{"center": [0, 0, 0], "magnitude": 5.0, "width": 0.2}]},
  "boundary": {"kind": "zero"},
  "numerics": {"newton_tol": 1e-12},
  "bending": {"K_C": 1.0, "K_G": 0.5}
})";

}  // namespace

TEST_CASE("reference configuration parses") {
    auto cfg = parse_config(kReference);
    CHECK(cfg.kind == GeometryKind::spherical);
    CHECK(cfg.radial.R_c == 2.0);
    CHECK(cfg.radial.node_count == 2048);
    CHECK(cfg.physics.eps_s == 80.0);
    REQUIRE(cfg.physics.ions.size() == 2);
    CHECK(cfg.physics.ions[1].charge == -1.0);
    REQUIRE(cfg.source.charges.size() == 1);
    CHECK(cfg.source.charges[0].magnitude == 5.0);
    CHECK(cfg.numerics.newton_tol == 1e-12);
    CHECK(cfg.bending.K_G == 0.5);
}

TEST_CASE("unknown keys are all reported with their paths") {
    const char* bad = R"({
      "geometry": {"kind": "spherical", "R_q": 2.0},
      "physic": {},
      "physics": {"ions": [{"charge": 1.0, "conc": 2.0}]},
      "boundary": {"kind": "weird"}
    })";
    try {
        parse_config(bad);
        FAIL("expected rejection");
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        CHECK(msg.find("geometry.R_q") != std::string::npos);
        CHECK(msg.find("(root).physic") != std::string::npos);
        CHECK(msg.find("physics.ions[0].conc") != std::string::npos);
        CHECK(msg.find("boundary.kind") != std::string::npos);
    }
}

TEST_CASE("type and semantic violations are rejected") {
    CHECK_THROWS(parse_config("not json at all"));
    CHECK_THROWS(parse_config(R"({"physics": {"eps_s": "eighty"}})"));
    CHECK_THROWS(parse_config(
        R"({"geometry": {"kind": "spherical", "R_c": 3.0, "R_e": 2.0}})"));
    CHECK_THROWS(parse_config(R"({"physics": {"eps_s": -1.0}})"));
    CHECK_THROWS(parse_config(R"({"sweep": {"key": "x", "values": []}})"));
}

TEST_CASE("boundary specifications produce the right data") {
    auto c = parse_config(R"({"boundary": {"kind": "constant", "value": 0.7}})");
    CHECK(c.boundary.make().g(Vec3(1, 2, 3)) == 0.7);
    auto a = parse_config(
        R"({"boundary": {"kind": "affine", "a": [1.0, 0.0, 2.0], "b": 0.5}})");
    CHECK(a.boundary.make().g(Vec3(1, 5, 2)) == doctest::Approx(5.5));
    RunConfig z;
    CHECK(z.boundary.make().g(Vec3(9, 9, 9)) == 0.0);
}

TEST_CASE("fingerprint is stable and parameter sensitive") {
    auto c1 = parse_config(kReference);
    auto c2 = parse_config(kReference);
    CHECK(config_fingerprint(c1) == config_fingerprint(c2));
    c2.physics.eps_m = 2.5;
    CHECK(config_fingerprint(c1) != config_fingerprint(c2));
}
