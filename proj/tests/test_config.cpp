#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "config.hpp"

#include <limits>
#include <random>

using namespace hksym_cli;

namespace {

  double randomReal(std::mt19937_64& rng)
  {
    switch (rng() % 4) {
    case 0: return std::uniform_real_distribution<double>(-10, 10)(rng);
    case 1: return static_cast<double>(static_cast<int>(rng() % 7)) - 3;
    case 2: return std::ldexp(std::uniform_real_distribution<double>(-1, 1)(rng), static_cast<int>(rng() % 80) - 40);
    default: return 0.1 * static_cast<double>(rng() % 100);
    }
  }

  Config randomConfig(std::mt19937_64& rng)
  {
    static const char* spaces[] = {"su:1,1", "su:1,2", "su:2,2", "sp:2", "so*:4", "soB:3", "su:3,5"};
    Config c;
    for (std::uint64_t i = 0, n = rng() % 4; i < n; ++i)
      c.spaces.push_back(spaces[rng() % 7]);
    for (std::uint64_t i = 0, n = rng() % 4; i < n; ++i)
      c.params.push_back({randomReal(rng), randomReal(rng), randomReal(rng), rng() % 2 ? 1 : -1});
    c.seed = rng() % 3 ? rng() : std::numeric_limits<std::uint64_t>::max();
    c.samples = 1 + static_cast<int>(rng() % 1000);
    c.tolAlgebraic = std::ldexp(1.0 + randomReal(rng) * 1e-3, -static_cast<int>(rng() % 50));
    c.tolFiniteDifference = std::uniform_real_distribution<double>(1e-9, 1e-3)(rng);
    c.format = rng() % 2 ? Format::json : Format::text;
    c.out = rng() % 2 ? "" : "reports/run " + std::to_string(rng() % 100) + ".json";
    return c;
  }

}

TEST_CASE("parse(render(config)) is the identity on generated configs")
{
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 500; ++i) {
    const Config c = randomConfig(rng);
    const std::string text = renderConfig(c);
    CAPTURE(text);
    const Config back = parseConfig(text);
    CHECK(back == c);
    CHECK(renderConfig(back) == text);
  }
}

TEST_CASE("missing fields keep their defaults")
{
  const Config c = parseConfig(R"({"spaces": ["sp:2"]})");
  CHECK(c.spaces == std::vector<std::string>{"sp:2"});
  CHECK(c.samples == 100);
  CHECK(c.seed == 0);
  CHECK(c.tolAlgebraic == 1e-9);
  CHECK(c.tolFiniteDifference == 1e-6);
  CHECK(c.format == Format::text);
  CHECK(c.params.empty());
}

TEST_CASE("malformed configs are rejected")
{
  CHECK_THROWS_AS(parseConfig("{"), ConfigError);
  CHECK_THROWS_AS(parseConfig("[]"), ConfigError);
  CHECK_THROWS_AS(parseConfig(R"({"spacez": []})"), ConfigError);
  CHECK_THROWS_AS(parseConfig(R"({"seed": -1})"), ConfigError);
  CHECK_THROWS_AS(parseConfig(R"({"seed": 1.5})"), ConfigError);
  CHECK_THROWS_AS(parseConfig(R"({"samples": "ten"})"), ConfigError);
  CHECK_THROWS_AS(parseConfig(R"({"format": "xml"})"), ConfigError);
  CHECK_THROWS_AS(parseConfig(R"({"params": ["1,0,0,3"]})"), ConfigError);
  CHECK_THROWS_AS(parseConfig(R"({"tolerances": {"structural": 1e-3}})"), ConfigError);
}

TEST_CASE("params strings")
{
  const hksym_params p = parseParams("1,0,0,-1");
  CHECK(p.eps == -1);
  CHECK(renderParams(p) == "1,0,0,-1");
  CHECK(renderParams(parseParams("+2.5,0,0,1")) == "2.5,0,0,+1");
  CHECK_THROWS_AS(parseParams("1,0,0"), ConfigError);
}
