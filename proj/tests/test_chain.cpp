#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "dextt/chain.hpp"

using namespace dextt;

namespace {

struct Fixture {
  KeyPair s = keypair_from_label("chain/s");
  KeyPair d = keypair_from_label("chain/d");
  ChainState genesis = ChainState::genesis(0, {{s.public_key, 1000}});

  Transaction claim(Amount amount, Seconds t0 = 0, Seconds t1 = 100) {
    return make_claim(d, make_poi(s, d, amount, t0, t1));
  }
};

}  // namespace

TEST_CASE("blocks arrive every interval") {
  Fixture f;
  SimChain chain(ChainConfig{}, f.genesis);
  CHECK(chain.next_block_time() == 13);
  for (int h = 1; h <= 4; ++h) {
    auto out = chain.produce_block(chain.next_block_time());
    CHECK(out.block.height == static_cast<std::uint64_t>(h));
    CHECK(out.block.timestamp == 13 * h);
  }
  CHECK(chain.height() == 4);
  CHECK(chain.last_block_time() == 52);
  CHECK_THROWS_AS(chain.produce_block(60), std::logic_error);
}

TEST_CASE("mempool is FIFO and capped per block") {
  Fixture f;
  ChainConfig cfg;
  cfg.max_txs_per_block = 2;
  SimChain chain(cfg, f.genesis);
  // Non-overlapping windows so the later claims are not conflicts.
  chain.submit(f.claim(5, 0, 20));
  chain.submit(f.claim(6, 21, 40));
  chain.submit(f.claim(7, 41, 60));
  CHECK(chain.mempool().size() == 3);

  auto first = chain.produce_block(13);
  REQUIRE(first.block.transactions.size() == 2);
  CHECK(std::get<Claim>(first.block.transactions[0].body).poi.intent.amount == 5);
  CHECK(first.results[0].ok());
  // second claim's window has not overlapped the first's, so it is admitted
  CHECK(first.results[1].ok());
  CHECK(chain.mempool().size() == 1);

  auto second = chain.produce_block(26);
  REQUIRE(second.block.transactions.size() == 1);
  CHECK(chain.state().poi_records.size() == 3);
}

TEST_CASE("transactions see the block timestamp") {
  Fixture f;
  SimChain chain(ChainConfig{}, f.genesis);
  chain.submit(f.claim(5, 0, 13));
  auto out = chain.produce_block(13);
  CHECK(out.results[0].error == TxError::expired_poi);
}

TEST_CASE("clock skew shifts timestamps but not the schedule") {
  Fixture f;
  ChainConfig cfg;
  cfg.clock_skew = -3;
  SimChain chain(cfg, f.genesis);
  chain.submit(f.claim(5, 0, 12));
  auto out = chain.produce_block(13);
  CHECK(out.block.timestamp == 10);
  CHECK(out.results[0].ok());
  CHECK(chain.next_block_time() == 26);
}

TEST_CASE("jitter stays within bounds and is reproducible") {
  Fixture f;
  ChainConfig cfg;
  cfg.jitter = 0.3;
  cfg.jitter_seed = 42;
  SimChain a(cfg, f.genesis);
  SimChain b(cfg, f.genesis);
  bool varied = false;
  for (int i = 0; i < 200; ++i) {
    const auto prev = a.last_block_time();
    const auto next = a.next_block_time();
    CHECK(next - prev >= 9);
    CHECK(next - prev <= 17);
    varied = varied || next - prev != 13;
    CHECK(b.next_block_time() == next);
    a.produce_block(next);
    b.produce_block(next);
  }
  CHECK(varied);
}

TEST_CASE("config validation") {
  ChainConfig cfg;
  cfg.block_interval = 0;
  CHECK_THROWS(validate(cfg));
  cfg = {};
  cfg.max_txs_per_block = 0;
  CHECK_THROWS(validate(cfg));
  cfg = {};
  cfg.jitter = 1.0;
  CHECK_THROWS(validate(cfg));
}

TEST_CASE("block log line is JSON") {
  Fixture f;
  SimChain chain(ChainConfig{}, f.genesis);
  chain.submit(f.claim(5));
  auto j = nlohmann::json::parse(block_log_line(chain.produce_block(13)));
  CHECK(j["height"] == 1);
  CHECK(j["transactions"][0]["kind"] == "claim");
  CHECK(j["transactions"][0]["result"] == "ok");
}
