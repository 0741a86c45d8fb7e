#include <doctest.h>

#include <string>

#include "pfnl/config.hpp"
#include "pfnl/error.hpp"

using namespace pfnl;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty text yields the documented defaults") {
  const RunConfig c = parse_config_text("");
  CHECK(c.d == 1);
  CHECK(c.n == 256);
  CHECK(c.eps == 0.1);
  CHECK(c.kernel_profile == "compact-bump");
  CHECK(c.potential_kind == "double-well");
  CHECK(c.dt == 1e-3);
  CHECK(c.eps_list == std::vector<double>{0.2, 0.1, 0.05, 0.025});
  CHECK(c.output_format == "csv");
  CHECK_FALSE(c.entries.empty());
}

TEST_CASE("sections prefix keys and comments are ignored") {
  const RunConfig c = parse_config_text(
      "# comment\n[grid]\nd = 2\nn = 64   # trailing\n[model]\neps = 0.2\n[sweep]\neps_list = 0.4, 0.2\n");
  CHECK(c.d == 2);
  CHECK(c.n == 64);
  CHECK(c.eps == 0.2);
  CHECK(c.eps_list == std::vector<double>{0.4, 0.2});
}

TEST_CASE("alpha outside the scaling bound is rejected with its line") {
  const std::string e = error_of("grid.d = 1\nkernel.alpha = 0.5\n");
  CHECK(e.find("t.cfg:2") != std::string::npos);
  CHECK(e.find("kernel.alpha") != std::string::npos);
  CHECK(e.find("0 <= alpha <= d - 1") != std::string::npos);
  CHECK(error_of("grid.d = 2\nkernel.alpha = 1.0\n").empty());
}

TEST_CASE("duplicate keys cite both lines") {
  const std::string e = error_of("model.eps = 0.1\n\nmodel.eps = 0.2\n");
  CHECK(e.find("duplicate") != std::string::npos);
  CHECK(e.find(":3") != std::string::npos);
  CHECK(e.find("line 1") != std::string::npos);
}

TEST_CASE("unknown keys and bad values are all reported together") {
  const std::string e = error_of("model.epsilon = 0.1\ngrid.n = -3\ntime.dt = abc\n");
  CHECK(e.find("unknown key 'model.epsilon'") != std::string::npos);
  CHECK(e.find("t.cfg:2") != std::string::npos);
  CHECK(e.find("t.cfg:3") != std::string::npos);
}

TEST_CASE("hash depends on content only") {
  const auto a = parse_config_text("model.eps = 0.2\n");
  const auto b = parse_config_text("[model]\neps = 0.2   # same\n");
  const auto c = parse_config_text("model.eps = 0.3\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
}

}
