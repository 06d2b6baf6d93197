#include "dextt/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dextt {

void validate(const ChainConfig& config) {
  if (config.block_interval <= 0) throw std::invalid_argument("block_interval must be positive");
  if (config.max_txs_per_block == 0) throw std::invalid_argument("max_txs_per_block must be positive");
  if (config.jitter < 0.0 || config.jitter >= 1.0) throw std::invalid_argument("jitter must be in [0, 1)");
}

SimChain::SimChain(ChainConfig config, ChainState genesis_state, const Verifier& verifier)
    : config_(config), state_(std::move(genesis_state)), verifier_(&verifier),
      jitter_rng_(config.jitter_seed) {
  validate(config_);
  state_.chain_id = config_.chain_id;
  next_block_time_ = draw_interval();
}

Seconds SimChain::draw_interval() {
  if (config_.jitter == 0.0) return last_block_time_ + config_.block_interval;
  std::uniform_real_distribution<double> factor(1.0 - config_.jitter, 1.0 + config_.jitter);
  auto dt = static_cast<Seconds>(std::llround(static_cast<double>(config_.block_interval) * factor(jitter_rng_)));
  return last_block_time_ + std::max<Seconds>(1, dt);
}

SubmitAck SimChain::submit(Transaction tx) {
  mempool_.push_back(std::move(tx));
  return {config_.chain_id, mempool_.size() - 1};
}

BlockOutcome SimChain::produce_block(Seconds timestamp) {
  if (timestamp != next_block_time_) {
    throw std::logic_error("block produced at " + std::to_string(timestamp) + ", expected " +
                           std::to_string(next_block_time_));
  }
  BlockOutcome out;
  out.chain_id = config_.chain_id;
  out.block.height = ++height_;
  out.block.timestamp = timestamp + config_.clock_skew;

  const auto take = std::min(config_.max_txs_per_block, mempool_.size());
  out.block.transactions.reserve(take);
  out.results.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.block.transactions.push_back(std::move(mempool_.front()));
    mempool_.pop_front();
    out.results.push_back(apply(state_, out.block.transactions.back(), out.block.timestamp, *verifier_));
  }

  last_block_time_ = timestamp;
  next_block_time_ = draw_interval();
  return out;
}

std::string block_log_line(const BlockOutcome& outcome) {
  nlohmann::json j;
  j["chain_id"] = outcome.chain_id;
  j["height"] = outcome.block.height;
  j["timestamp"] = outcome.block.timestamp;
  auto txs = nlohmann::json::array();
  for (std::size_t i = 0; i < outcome.block.transactions.size(); ++i) {
    const auto& tx = outcome.block.transactions[i];
    txs.push_back({{"kind", to_string(tx.kind())},
                   {"alpha", subject_alpha(tx).short_hex()},
                   {"poster", tx.poster.hex().substr(0, 12)},
                   {"result", to_string(outcome.results[i].error)}});
  }
  j["transactions"] = std::move(txs);
  return j.dump();
}

}  // namespace dextt
