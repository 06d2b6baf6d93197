#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dextt/contract.hpp"

namespace dextt::testing {

/// Number of prefix minima in `values` (each value smaller than all before it).
std::size_t left_to_right_minima(std::span<const double> values);

/// A random batch of valid, mutually non-conflicting transfers with contests.
/// `open_phase` transactions are valid at `open_time` in any order;
/// `close_phase` ones at `close_time` in any order.
struct TransactionSet {
  std::map<PublicKey, Amount> genesis;
  Seconds open_time = 0;
  Seconds close_time = 0;
  std::vector<Transaction> open_phase;
  std::vector<Transaction> close_phase;
};

TransactionSet random_transaction_set(std::uint64_t seed);

/// Applies both phases after shuffling each with `rng`. Every transaction must succeed.
ChainState apply_shuffled(const TransactionSet& set, std::mt19937_64& rng, std::vector<std::string>* errors = nullptr);

/// Balances, burned supply, PoI statuses/winners and veto winners agree.
/// Contestant lists are compared as sets.
bool same_outcome(const ChainState& a, const ChainState& b);

/// Two chains learn a conflicting pair in opposite order and each receives
/// the vetoes in a different order; returns both final states.
std::pair<ChainState, ChainState> veto_in_both_orders(std::uint64_t seed);

}  // namespace dextt::testing
