#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "dextt/contract.hpp"

namespace dextt {

struct ChainConfig {
  ChainId chain_id = 0;
  Seconds block_interval = 13;
  // Stand-in for the block gas limit (8 MGas / 81.5 kGas per contest).
  std::size_t max_txs_per_block = 100;
  // Each interval is scaled by a uniform factor in [1 - jitter, 1 + jitter].
  double jitter = 0.0;
  std::uint64_t jitter_seed = 0;
  // Added to every block timestamp of this chain.
  Seconds clock_skew = 0;
};

void validate(const ChainConfig& config);

struct Block {
  std::uint64_t height = 0;
  Seconds timestamp = 0;
  std::vector<Transaction> transactions;
};

struct BlockOutcome {
  ChainId chain_id = 0;
  Block block;
  std::vector<ApplyResult> results;  // parallel to block.transactions
};

struct SubmitAck {
  ChainId chain_id = 0;
  std::size_t queue_position = 0;
};

/// A single simulated chain: FIFO mempool, fixed-cadence blocks, and the
/// contract state the blocks are applied to.
class SimChain {
 public:
  SimChain(ChainConfig config, ChainState genesis_state,
           const Verifier& verifier = direct_verifier());

  /// Queues tx; validity is decided when a block includes it.
  SubmitAck submit(Transaction tx);

  /// Produces the next block. `timestamp` must equal next_block_time().
  BlockOutcome produce_block(Seconds timestamp);

  /// Nominal time of the next block, before clock skew.
  Seconds next_block_time() const { return next_block_time_; }
  Seconds last_block_time() const { return last_block_time_; }
  std::uint64_t height() const { return height_; }

  const ChainConfig& config() const { return config_; }
  const ChainState& state() const { return state_; }
  ChainState& mutable_state() { return state_; }
  const std::deque<Transaction>& mempool() const { return mempool_; }

 private:
  Seconds draw_interval();

  ChainConfig config_;
  ChainState state_;
  const Verifier* verifier_;
  std::deque<Transaction> mempool_;
  std::uint64_t height_ = 0;
  Seconds last_block_time_ = 0;
  Seconds next_block_time_ = 0;
  std::mt19937_64 jitter_rng_;
};

/// One JSON line summarizing a block (chain_id, height, timestamp, txs).
std::string block_log_line(const BlockOutcome& outcome);

}  // namespace dextt
