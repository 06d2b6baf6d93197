#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dextt/agents.hpp"

namespace dextt {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct WalletSpec {
  std::string name;
  Amount balance = 0;
  // Key seed is SHA-256 of this label. Empty: derived from the run seed and name.
  std::string key_label;
};

struct ScriptedTransfer {
  std::string sender;
  std::string recipient;
  Amount amount = 0;
  // Unset: t0 = ceil(submit_at), t1 = t0 + validity_length.
  std::optional<Seconds> t0;
  std::optional<Seconds> t1;
  std::size_t claim_chain = 0;
  Millis submit_at = 0;
};

/// Two overlapping PoIs from one sender, each claimed by its recipient.
struct DoubleSpendScript {
  std::string sender;
  std::array<std::string, 2> recipients;
  std::array<Amount, 2> amounts{};
  std::array<Seconds, 2> t0{};
  std::array<Seconds, 2> t1{};
  std::array<std::size_t, 2> claim_chains{};
  std::array<Millis, 2> submit_at{};
};

struct EcosystemConfig {
  std::vector<ChainConfig> chains;
  std::vector<WalletSpec> wallets;

  std::size_t client_count = 0;
  Amount client_balance = 0;
  ClientWorkload workload;

  std::size_t observer_count = 0;
  // Named wallets from `wallets` that also act as observers.
  std::vector<std::string> observer_wallets;
  ObserverPolicy observer_policy;

  Seconds validity_length = 65;
  Amount reward = kDefaultReward;
  std::uint64_t seed = 1;
  Seconds duration = 1800;

  std::vector<ScriptedTransfer> transfers;
  std::vector<DoubleSpendScript> double_spends;

  // Reset balances of wallets touched by a corrupted transfer to the
  // cross-chain majority so long runs can continue.
  bool resync_corrupted = true;
  bool record_blocks = false;
};

/// Throws ConfigError naming the offending field.
void validate(const EcosystemConfig& config);

/// `count` chains with ids 0..count-1 sharing the given settings.
std::vector<ChainConfig> uniform_chains(std::size_t count, Seconds block_interval = 13,
                                        std::size_t max_txs_per_block = 100, double jitter = 0.0);

// ---- reports -----------------------------------------------------------------

struct TransferEntry {
  Signature alpha;
  std::string sender;
  std::string recipient;
  Amount amount = 0;
  Seconds t0 = 0;
  Seconds t1 = 0;
  std::size_t claim_chain = 0;
  std::vector<std::string> status_per_chain;
  std::vector<std::size_t> contests_per_chain;
  std::optional<std::string> winner;
  bool corrupted = false;
  bool double_spend = false;
};

struct TxTally {
  std::array<std::uint64_t, 5> included{};
  std::array<std::uint64_t, 5> accepted{};

  std::uint64_t included_of(TxKind k) const { return included[static_cast<std::size_t>(k)]; }
  std::uint64_t accepted_of(TxKind k) const { return accepted[static_cast<std::size_t>(k)]; }
};

struct Inconsistency {
  std::string wallet;
  std::vector<Amount> balances;  // per chain
  std::vector<ChainId> divergent_chains;
};

struct RunReport {
  std::uint64_t seed = 0;
  Seconds duration = 0;
  Millis end_time = 0;
  std::size_t observer_count = 0;
  std::vector<ChainState> final_states;
  std::vector<TransferEntry> transfers;
  TxTally tally;
  std::vector<Inconsistency> inconsistencies;
  std::vector<SupplyReport> supply;
  std::map<PublicKey, std::string> names;
  std::vector<std::string> block_log;

  std::string name_of(const PublicKey& key) const;
  NameLookup name_lookup() const;
};

/// Runs the ecosystem to `duration`, then drains until every PoI and veto
/// contest is past its deadline by two block intervals.
RunReport run(const EcosystemConfig& config);

/// Empty iff every wallet holds the same balance on every chain.
std::vector<Inconsistency> check_consistency(std::span<const ChainState> states,
                                             const NameLookup& names = {});

struct TransferOutcome {
  std::vector<std::optional<PoiStatus>> status;  // per chain; nullopt = unknown there
  std::vector<std::optional<PublicKey>> winners;
  bool corrupted = false;
};

/// A transfer is corrupted iff it finalized on a non-empty proper subset of
/// chains, or finalized with different winners.
TransferOutcome classify_transfer(std::span<const ChainState> states, const Signature& alpha);

/// Sets each wallet's balance to the value most chains agree on (ties go to
/// the lowest chain id). Differences are booked as supply adjustments.
void resync_to_majority(std::span<ChainState> states, std::span<const PublicKey> wallets);

std::size_t count_corrupted(const RunReport& report);

/// Average confirmed contests per chain over transfers known on every chain.
double mean_contests_per_chain(const RunReport& report);

nlohmann::json to_json(const RunReport& report);
std::string ledger_csv(const RunReport& report);

}  // namespace dextt
