#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dextt/config.hpp"

using namespace dextt;

namespace {

const std::string kRoot = DEXTT_SOURCE_DIR;

std::string error_of(std::string_view text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ConfigParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("bundled configs parse") {
  auto w = load_config(kRoot + "/configs/worked_example.json");
  CHECK(w.ecosystem.chains.size() == 3);
  CHECK(w.ecosystem.wallets.size() == 5);
  CHECK(w.ecosystem.observer_wallets.size() == 3);
  CHECK(w.ecosystem.observer_policy.contest_rule == ContestRule::always);
  CHECK(w.ecosystem.observer_policy.observation_delay.max == 2000);
  REQUIRE(w.ecosystem.transfers.size() == 1);
  CHECK(w.ecosystem.transfers[0].t1 == 61);

  auto e = load_config(kRoot + "/configs/ecosystem.json");
  CHECK(e.ecosystem.client_count == 10);
  CHECK(e.ecosystem.workload.validity_length == 65);
  CHECK(e.gas.contest.mean_kgas == 81.5);
  CHECK(e.price.ether_usd == 115.71);
  CHECK(validity_points(e.experiments).size() == 13);
  CHECK(e.experiments.cost_n == std::vector<std::size_t>{10, 100, 1000});
}

TEST_CASE("defaults") {
  auto c = parse_config("{}");
  CHECK(c.ecosystem.chains.size() == 3);
  CHECK(c.ecosystem.chains[0].block_interval == 13);
  CHECK(c.ecosystem.reward == 1);
  CHECK(c.gas.claim.mean_kgas == 57.7);
  CHECK(c.price.gas_price_gwei == 10.0);
  CHECK(validity_points(c.experiments).front() == 10);
  CHECK(validity_points(c.experiments).back() == 70);
  CHECK(seeds_or_default(c.experiments).size() == 10);
}

TEST_CASE("syntax errors carry line and column") {
  auto msg = error_of("{\n  \"reward\": 1,\n  \"duration\": ,\n}");
  CHECK(msg.rfind("cfg.json:3:", 0) == 0);
  CHECK(msg.find("syntax error") != std::string::npos);
}

TEST_CASE("schema errors name the field and its line") {
  auto msg = error_of("{\n  \"chains\": {\"count\": 3},\n  \"wallets\": [\n    {\"name\": \"a\", \"balance\": -4}\n  ]\n}");
  CHECK(msg == "cfg.json:4: wallets[0].balance: expected a non-negative integer");

  CHECK(error_of("{\"chainz\": {}}") == "cfg.json:1: chainz: unknown key");
  CHECK(error_of("{\"observers\": {\"contest_rule\": \"maybe\"}}").find("observers.contest_rule") != std::string::npos);
  CHECK(error_of("{\"chains\": {\"count\": 0}}").find("chains.count") != std::string::npos);
}

TEST_CASE("cross-field validation errors") {
  auto msg = error_of(R"({"wallets": [{"name": "a", "balance": 5}],
  "transfers": [{"sender": "a", "recipient": "b", "amount": 3}]})");
  CHECK(msg.find("transfers[0].recipient: unknown wallet 'b'") != std::string::npos);
  CHECK(msg.rfind("cfg.json:2:", 0) == 0);

  auto dup = error_of(R"({"wallets": [{"name": "a"}, {"name": "a"}]})");
  CHECK(dup.find("duplicate wallet") != std::string::npos);

  auto overlap = error_of(R"({"wallets": [{"name": "s", "balance": 9}, {"name": "x"}, {"name": "y"}],
    "double_spends": [{"sender": "s", "legs": [
      {"recipient": "x", "amount": 3, "t0": 0, "t1": 10},
      {"recipient": "y", "amount": 3, "t0": 20, "t1": 30}]}]})");
  CHECK(overlap.find("windows must overlap") != std::string::npos);
}

TEST_CASE("seconds become milliseconds") {
  auto c = parse_config(R"({"observers": {"delay": [0.25, 1.5]},
    "wallets": [{"name": "a", "balance": 9}, {"name": "b"}],
    "transfers": [{"sender": "a", "recipient": "b", "amount": 3, "submit_at": 2.5}]})");
  CHECK(c.ecosystem.observer_policy.observation_delay.min == 250);
  CHECK(c.ecosystem.observer_policy.observation_delay.max == 1500);
  CHECK(c.ecosystem.transfers[0].submit_at == 2500);
  CHECK_FALSE(c.ecosystem.transfers[0].t0);
}

TEST_CASE("clock skew is per chain") {
  auto c = parse_config(R"({"chains": {"count": 2, "clock_skew": [0, -2]}})");
  CHECK(c.ecosystem.chains[1].clock_skew == -2);
  CHECK(error_of(R"({"chains": {"count": 2, "clock_skew": [0]}})").find("one entry per chain") != std::string::npos);
}
