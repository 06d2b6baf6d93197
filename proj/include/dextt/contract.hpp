#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dextt/protocol.hpp"

namespace dextt {

using ChainId = std::uint32_t;

enum class PoiStatus { pending, finalized, vetoed };
enum class VetoStatus { open, finalized };

std::string_view to_string(PoiStatus status);
std::string_view to_string(VetoStatus status);

struct PoiRecord {
  ProofOfIntent poi;
  std::vector<Contestant> contestants;
  PoiStatus status = PoiStatus::pending;
  // Set at finalization; empty when nobody contested.
  std::optional<PublicKey> winner;

  bool operator==(const PoiRecord&) const = default;
};

struct VetoRecord {
  VetoKey pair;
  Seconds deadline = 0;
  std::vector<Contestant> veto_contestants;
  VetoStatus status = VetoStatus::open;
  // Sender balance destroyed when this record was opened.
  Amount forfeited = 0;
  std::optional<PublicKey> winner;

  bool operator==(const VetoRecord&) const = default;
};

/// One chain's contract storage.
struct ChainState {
  ChainId chain_id = 0;
  std::map<PublicKey, Amount> balances;
  std::map<Signature, PoiRecord> poi_records;
  std::map<VetoKey, VetoRecord> veto_records;
  Amount burned = 0;
  Amount reward = kDefaultReward;
  Amount initial_supply = 0;
  // Net administrative balance changes (majority resync after corruption).
  std::int64_t supply_adjustment = 0;

  static ChainState genesis(ChainId id, std::map<PublicKey, Amount> balances,
                            Amount reward = kDefaultReward);

  Amount balance_of(const PublicKey& wallet) const;
  const PoiRecord* find_poi(const Signature& alpha) const;
  const VetoRecord* find_veto(const VetoKey& key) const;

  bool operator==(const ChainState&) const = default;
};

enum class TxError {
  none,
  bad_signature,
  insufficient_balance,
  expired_poi,
  conflicting_poi,
  unknown_poi,
  premature,
  already_concluded,
  vetoed_poi,
  not_conflicting,
  unknown_veto,
};

std::string_view to_string(TxError error);

struct ApplyResult {
  TxError error = TxError::none;
  // For conflicting_poi: the stored PoI and the rejected one.
  std::optional<std::pair<ProofOfIntent, ProofOfIntent>> conflict;
  // False for accepted no-ops such as a repeated contest.
  bool changed = false;

  bool ok() const { return error == TxError::none; }
  static ApplyResult success(bool changed = true) { return {TxError::none, std::nullopt, changed}; }
  static ApplyResult failure(TxError e) { return {e, std::nullopt, false}; }

  bool operator==(const ApplyResult&) const = default;
};

// Each apply_* validates first and mutates `state` only on success.

ApplyResult apply_claim(ChainState& state, const Claim& tx, Seconds now,
                        const Verifier& verifier = direct_verifier());
ApplyResult apply_contest(ChainState& state, const Contest& tx, Seconds now,
                          const Verifier& verifier = direct_verifier());
ApplyResult apply_finalize(ChainState& state, const Finalize& tx, Seconds now);
ApplyResult apply_veto(ChainState& state, const Veto& tx, Seconds now,
                       const Verifier& verifier = direct_verifier());
ApplyResult apply_finalize_veto(ChainState& state, const FinalizeVeto& tx, Seconds now);

/// Checks the poster's envelope signature, then dispatches on the body.
ApplyResult apply(ChainState& state, const Transaction& tx, Seconds now,
                  const Verifier& verifier = direct_verifier());

struct SupplyReport {
  Amount balances_total = 0;
  Amount burned = 0;
  Amount initial_supply = 0;
  std::int64_t adjustment = 0;
  bool conserved = false;
  bool operator==(const SupplyReport&) const = default;
};

SupplyReport audit(const ChainState& state);

/// Maps wallet keys to display names in snapshots; unknown keys print as hex.
using NameLookup = std::function<std::string(const PublicKey&)>;

/// Canonical JSON snapshot: sorted keys, integer amounts.
nlohmann::json snapshot(const ChainState& state, const NameLookup& names = {},
                        bool include_records = true);

}  // namespace dextt
