#include <doctest.h>

#include "rotmul/config.hpp"
#include "rotmul/errors.hpp"

using namespace rotmul;

TEST_CASE("flat config parsing") {
  const auto c = parse_flat_config("# comment\n; other\n\ntheta = 0.3\nt_final=12\nout = \"a b.csv\"\n");
  REQUIRE(c.size() == 3);
  CHECK(c[0] == std::pair<std::string, std::string>{"theta", "0.3"});
  CHECK(c[1].first == "t-final");
  CHECK(c[2].second == "a b.csv");
  CHECK_THROWS_AS(parse_flat_config("theta 0.3\n"), InputError);
  CHECK_THROWS_AS(parse_flat_config("=3\n"), InputError);
  CHECK_THROWS_AS(load_flat_config("/nonexistent/rotmul.cfg"), InputError);
}

TEST_CASE("command line overrides the file") {
  const std::vector<std::string> args{"rotmul", "simulate", "--theta", "0.1", "--config", "f"};
  const FlatConfig cfg{{"theta", "0.5"}, {"n", "12"}, {"clamp", "true"}, {"all", "false"}};
  const auto merged = merge_config_args(args, cfg, {"clamp", "all"});
  const std::vector<std::string> expected{"rotmul", "simulate", "--n=12", "--clamp", "--theta", "0.1", "--config", "f"};
  CHECK(merged == expected);

  const std::vector<std::string> eq{"rotmul", "sweep", "--n=3"};
  CHECK(merge_config_args(eq, {{"n", "9"}}) == eq);
  CHECK_THROWS_AS(merge_config_args(args, {{"clamp", "maybe"}}, {"clamp"}), InputError);
}
