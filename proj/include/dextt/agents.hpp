#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dextt/chain.hpp"

namespace dextt {

/// Simulation clock resolution.
using Millis = std::int64_t;

constexpr Millis to_millis(Seconds s) { return s * 1000; }
/// Smallest whole second at or after `t`.
constexpr Seconds ceil_seconds(Millis t) { return t <= 0 ? -((-t) / 1000) : (t + 999) / 1000; }

struct Wallet {
  std::string name;
  KeyPair key;
};

struct Submission {
  std::size_t chain = 0;
  Transaction tx;
};

struct ScheduledSubmission {
  Millis at = 0;
  std::size_t chain = 0;
  Transaction tx;
};

/// Lowest balance of `wallet` across chains; what a cautious client can spend.
Amount spendable_balance(std::span<const SimChain> chains, const PublicKey& wallet);

/// Lowest-ranked contestant for `alpha` on a chain, counting both confirmed
/// contests and contests still waiting in the public mempool.
std::optional<Contestant> known_min_contestant(const SimChain& chain, const Signature& alpha);
std::optional<Contestant> known_min_veto_contestant(const SimChain& chain, const VetoKey& key);

// ---- clients ---------------------------------------------------------------

struct ClientWorkload {
  Seconds think_min = 15;
  Seconds think_max = 30;
  Seconds validity_length = 65;
  Amount reward = kDefaultReward;
};

struct ClientAction {
  std::optional<ProofOfIntent> poi;
  std::optional<Submission> claim;
  std::vector<ScheduledSubmission> finalizes;
  Millis next_wake = 0;
};

/// One iteration of a transfer-initiating client. The recipient countersigns
/// and posts the CLAIM, then FINALIZE on every chain one block after t1.
ClientAction client_step(const Wallet& client, std::span<const Wallet> recipients,
                         const ClientWorkload& workload, std::span<const SimChain> chains, Millis now,
                         std::mt19937_64& rng);

/// Builds the recipient-side submissions for an already signed PoI.
ClientAction transfer_submissions(const Wallet& recipient, const ProofOfIntent& poi,
                                  std::size_t claim_chain, std::span<const SimChain> chains);

// ---- observers and watchdogs -----------------------------------------------

enum class ContestRule { winnable, always };

struct DelaySpec {
  Millis min = 0;
  Millis max = 2000;
};

struct ObserverPolicy {
  DelaySpec observation_delay;
  ContestRule contest_rule = ContestRule::winnable;
  bool watchdog = true;
};

/// Post-iff-winnable: contest when nobody known ranks below `mine`.
bool should_contest(const Contestant& mine, const std::optional<Contestant>& current_min,
                    ContestRule rule);

struct WatchCase {
  ProofOfIntent first;
  ProofOfIntent second;
  Signature omega;
  Seconds deadline = 0;
  std::vector<bool> in_flight;
  std::vector<bool> settled;
  bool finalize_scheduled = false;
};

struct Observer {
  Wallet wallet;
  ObserverPolicy policy;
  std::set<Signature> contested;
  std::map<PublicKey, std::vector<ProofOfIntent>> seen_by_sender;
  std::map<VetoKey, WatchCase> cases;
};

/// Contest submissions for a PoI the observer sees for the first time.
std::vector<Submission> observer_step(Observer& observer, const ProofOfIntent& poi,
                                      std::span<const SimChain> chains, Millis now);

struct WatchdogAction {
  std::vector<Submission> vetoes;
  std::optional<Millis> finalize_check_at;
};

/// Reports a conflicting pair on every chain that knows either PoI. Chains
/// knowing neither are retried on later observations.
WatchdogAction watchdog_step(Observer& observer, const ProofOfIntent& a, const ProofOfIntent& b,
                             std::span<const SimChain> chains, Millis now);

/// FINALIZE-VETO on every chain where the observer currently leads the veto contest.
std::vector<Submission> finalize_veto_step(const Observer& observer, const VetoKey& key,
                                           std::span<const SimChain> chains);

struct ObserverReaction {
  std::vector<Submission> submissions;
  std::vector<std::pair<Millis, VetoKey>> finalize_checks;
};

/// Processes one observed block: contests new PoIs, detects conflicts
/// (including CLAIM/CONTEST rejections carrying both PoIs) and retries
/// outstanding vetoes.
ObserverReaction observe_block(Observer& observer, const BlockOutcome& outcome,
                               std::span<const SimChain> chains, Millis now);

// ---- adversary ---------------------------------------------------------------

/// Two PoIs from the same sender with overlapping windows to different recipients.
std::pair<ProofOfIntent, ProofOfIntent> make_double_spend(const KeyPair& sender, const KeyPair& first,
                                                          const KeyPair& second, Amount amount_first,
                                                          Amount amount_second, Seconds t0_first,
                                                          Seconds t1_first, Seconds t0_second,
                                                          Seconds t1_second, Amount reward);

}  // namespace dextt
