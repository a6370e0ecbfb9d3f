#include <string>

#include "doctest.h"
#include "levyop/errors.hpp"
#include "levyop/io.hpp"

using namespace levyop;

TEST_CASE("minimal config parses with defaults") {
  const ExperimentConfig cfg = parse_config("[experiment]\nkind = none\n");
  CHECK(cfg.kind == "none");
  CHECK(cfg.stages().empty());
  CHECK(cfg.kernel.alpha == 1.5);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("alpha out of range fails validation with a clear message") {
  const ExperimentConfig cfg = parse_config("[experiment]\nkind = symbol\n[kernel]\nalpha = 2.5\n");
  try {
    cfg.validate();
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("alpha out of (0,2)") != std::string::npos);
  }
}

TEST_CASE("unknown keys and sections name the line") {
  try {
    parse_config("[kernel]\nalpah = 1\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[nonsense]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[kernel]\nalpha = fast\n"), ConfigError);
}

TEST_CASE("checks keep dotted metric names") {
  const ExperimentConfig cfg = parse_config("[checks]\nmax.resolvent.iterations = 15\nmin.cauchy.min_u_over_f = -1e-10\n");
  REQUIRE(cfg.checks.size() == 2);
  CHECK(cfg.checks[0].metric == "resolvent.iterations");
  CHECK(cfg.checks[0].upper);
  CHECK(cfg.checks[0].bound == 15.0);
  CHECK_FALSE(cfg.checks[1].upper);
}

TEST_CASE("kinds map to stage lists") {
  CHECK(stages_for_kind("crosscheck") == std::vector<std::string>{"symbol", "resolvent", "cauchy", "simulate", "mcpde"});
  CHECK(stages_for_kind("verify-martingale") == std::vector<std::string>{"verify-martingale"});
  CHECK_THROWS_AS(stages_for_kind("everything"), ConfigError);
}

TEST_CASE("x-dependent coefficient needs an integer half-period") {
  const ExperimentConfig cfg =
      parse_config("[experiment]\nkind = symbol\n[kernel]\ncoefficient = trig\na1 = 0.3\n[grid]\nhalf_period = 1.5\n");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("hashing and number lists") {
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(parse_number_list("1, 2.5,-3") == std::vector<double>{1, 2.5, -3});
  CHECK_THROWS_AS(parse_number_list("1, x"), ConfigError);
}
