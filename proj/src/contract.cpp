#include "dextt/contract.hpp"

#include <algorithm>

namespace dextt {

std::string_view to_string(PoiStatus status) {
  switch (status) {
    case PoiStatus::pending: return "pending";
    case PoiStatus::finalized: return "finalized";
    case PoiStatus::vetoed: return "vetoed";
  }
  return "unknown";
}

std::string_view to_string(VetoStatus status) {
  return status == VetoStatus::open ? "open" : "finalized";
}

std::string_view to_string(TxError error) {
  switch (error) {
    case TxError::none: return "ok";
    case TxError::bad_signature: return "bad-signature";
    case TxError::insufficient_balance: return "insufficient-balance";
    case TxError::expired_poi: return "expired-poi";
    case TxError::conflicting_poi: return "conflicting-poi";
    case TxError::unknown_poi: return "unknown-poi";
    case TxError::premature: return "premature";
    case TxError::already_concluded: return "already-concluded";
    case TxError::vetoed_poi: return "vetoed-poi";
    case TxError::not_conflicting: return "not-conflicting";
    case TxError::unknown_veto: return "unknown-veto";
  }
  return "unknown";
}

ChainState ChainState::genesis(ChainId id, std::map<PublicKey, Amount> balances, Amount reward) {
  ChainState s;
  s.chain_id = id;
  s.reward = reward;
  for (const auto& [_, amount] : balances) s.initial_supply += amount;
  s.balances = std::move(balances);
  return s;
}

Amount ChainState::balance_of(const PublicKey& wallet) const {
  auto it = balances.find(wallet);
  return it == balances.end() ? 0 : it->second;
}

const PoiRecord* ChainState::find_poi(const Signature& alpha) const {
  auto it = poi_records.find(alpha);
  return it == poi_records.end() ? nullptr : &it->second;
}

const VetoRecord* ChainState::find_veto(const VetoKey& key) const {
  auto it = veto_records.find(key);
  return it == veto_records.end() ? nullptr : &it->second;
}

namespace {

const PoiRecord* pending_conflict(const ChainState& state, const ProofOfIntent& poi) {
  for (const auto& [_, record] : state.poi_records) {
    if (record.status == PoiStatus::pending && conflicts(record.poi, poi)) return &record;
  }
  return nullptr;
}

// Shared CLAIM/CONTEST admission for a PoI the chain does not know yet.
ApplyResult admit_new_poi(const ChainState& state, const ProofOfIntent& poi) {
  if (state.balance_of(poi.intent.sender) < poi.intent.amount) {
    return ApplyResult::failure(TxError::insufficient_balance);
  }
  if (const auto* other = pending_conflict(state, poi)) {
    ApplyResult r = ApplyResult::failure(TxError::conflicting_poi);
    r.conflict = std::make_pair(other->poi, poi);
    return r;
  }
  return ApplyResult::success();
}

const Contestant& lowest(const std::vector<Contestant>& contestants) {
  return *std::min_element(contestants.begin(), contestants.end(), ranks_before);
}

bool has_contestant(const std::vector<Contestant>& contestants, const PublicKey& wallet) {
  return std::any_of(contestants.begin(), contestants.end(),
                     [&](const Contestant& c) { return c.wallet == wallet; });
}

}  // namespace

ApplyResult apply_claim(ChainState& state, const Claim& tx, Seconds now, const Verifier& verifier) {
  const auto& poi = tx.poi;
  if (!poi_signatures_valid(poi, verifier)) return ApplyResult::failure(TxError::bad_signature);
  if (now >= poi.intent.t1) return ApplyResult::failure(TxError::expired_poi);

  if (const auto* known = state.find_poi(poi.alpha)) {
    if (known->status == PoiStatus::vetoed) return ApplyResult::failure(TxError::vetoed_poi);
    return ApplyResult::success(false);
  }
  auto admitted = admit_new_poi(state, poi);
  if (!admitted.ok()) return admitted;

  state.poi_records.emplace(poi.alpha, PoiRecord{poi, {}, PoiStatus::pending, std::nullopt});
  return ApplyResult::success();
}

ApplyResult apply_contest(ChainState& state, const Contest& tx, Seconds now, const Verifier& verifier) {
  const auto& poi = tx.poi;
  if (!poi_signatures_valid(poi, verifier) || !verifier.check(tx.contestant, encode(poi), tx.omega)) {
    return ApplyResult::failure(TxError::bad_signature);
  }
  if (now >= poi.intent.t1) return ApplyResult::failure(TxError::expired_poi);

  auto it = state.poi_records.find(poi.alpha);
  if (it != state.poi_records.end()) {
    auto& record = it->second;
    if (record.status == PoiStatus::vetoed) return ApplyResult::failure(TxError::vetoed_poi);
    if (record.status == PoiStatus::finalized) return ApplyResult::failure(TxError::already_concluded);
    if (has_contestant(record.contestants, tx.contestant)) return ApplyResult::success(false);
    record.contestants.push_back({tx.contestant, tx.omega});
    return ApplyResult::success();
  }

  auto admitted = admit_new_poi(state, poi);
  if (!admitted.ok()) return admitted;
  state.poi_records.emplace(
      poi.alpha, PoiRecord{poi, {{tx.contestant, tx.omega}}, PoiStatus::pending, std::nullopt});
  return ApplyResult::success();
}

ApplyResult apply_finalize(ChainState& state, const Finalize& tx, Seconds now) {
  auto it = state.poi_records.find(tx.alpha);
  if (it == state.poi_records.end()) return ApplyResult::failure(TxError::unknown_poi);
  auto& record = it->second;
  if (record.status == PoiStatus::vetoed) return ApplyResult::failure(TxError::vetoed_poi);
  if (record.status == PoiStatus::finalized) return ApplyResult::failure(TxError::already_concluded);

  const auto& intent = record.poi.intent;
  if (now <= intent.t1) return ApplyResult::failure(TxError::premature);
  // Only reachable after a veto zeroed the sender while this PoI had already
  // expired; the transfer cannot execute.
  if (state.balance_of(intent.sender) < intent.amount) {
    return ApplyResult::failure(TxError::insufficient_balance);
  }

  state.balances[intent.sender] -= intent.amount;
  state.balances[intent.recipient] += intent.amount - state.reward;
  if (record.contestants.empty()) {
    state.burned += state.reward;
  } else {
    const auto& winner = lowest(record.contestants);
    state.balances[winner.wallet] += state.reward;
    record.winner = winner.wallet;
  }
  record.status = PoiStatus::finalized;
  return ApplyResult::success();
}

ApplyResult apply_veto(ChainState& state, const Veto& tx, Seconds now, const Verifier& verifier) {
  const auto* known = state.find_poi(tx.alpha);
  if (known == nullptr) return ApplyResult::failure(TxError::unknown_poi);
  if (!poi_signatures_valid(tx.conflicting, verifier) ||
      !verifier.check(tx.vetoer, encode_veto_payload(tx.alpha, tx.conflicting.alpha), tx.omega)) {
    return ApplyResult::failure(TxError::bad_signature);
  }
  if (!conflicts(known->poi, tx.conflicting)) return ApplyResult::failure(TxError::not_conflicting);

  const auto key = VetoKey::of(tx.alpha, tx.conflicting.alpha);
  if (auto it = state.veto_records.find(key); it != state.veto_records.end()) {
    auto& record = it->second;
    if (record.status == VetoStatus::finalized) return ApplyResult::failure(TxError::already_concluded);
    if (has_contestant(record.veto_contestants, tx.vetoer)) return ApplyResult::success(false);
    record.veto_contestants.push_back({tx.vetoer, tx.omega});
    return ApplyResult::success();
  }

  const auto sender = known->poi.intent.sender;
  const auto deadline = veto_deadline(known->poi, tx.conflicting);

  state.poi_records.try_emplace(tx.conflicting.alpha,
                                PoiRecord{tx.conflicting, {}, PoiStatus::pending, std::nullopt});
  for (auto& [_, record] : state.poi_records) {
    if (record.status == PoiStatus::pending && record.poi.intent.sender == sender &&
        now < record.poi.intent.t1) {
      record.status = PoiStatus::vetoed;
    }
  }

  Amount forfeited = 0;
  if (auto b = state.balances.find(sender); b != state.balances.end()) {
    forfeited = b->second;
    b->second = 0;
  }
  state.burned += forfeited;

  VetoRecord record;
  record.pair = key;
  record.deadline = deadline;
  record.veto_contestants.push_back({tx.vetoer, tx.omega});
  record.forfeited = forfeited;
  state.veto_records.emplace(key, std::move(record));
  return ApplyResult::success();
}

ApplyResult apply_finalize_veto(ChainState& state, const FinalizeVeto& tx, Seconds now) {
  auto it = state.veto_records.find(VetoKey::of(tx.alpha, tx.alpha_prime));
  if (it == state.veto_records.end()) return ApplyResult::failure(TxError::unknown_veto);
  auto& record = it->second;
  if (record.status == VetoStatus::finalized) return ApplyResult::failure(TxError::already_concluded);
  if (now <= record.deadline) return ApplyResult::failure(TxError::premature);

  const auto& winner = lowest(record.veto_contestants);
  const Amount paid = std::min(state.reward, record.forfeited);
  state.balances[winner.wallet] += paid;
  state.burned -= paid;
  record.winner = winner.wallet;
  record.status = VetoStatus::finalized;
  return ApplyResult::success();
}

ApplyResult apply(ChainState& state, const Transaction& tx, Seconds now, const Verifier& verifier) {
  if (!envelope_valid(tx, verifier)) return ApplyResult::failure(TxError::bad_signature);
  struct Visitor {
    ChainState& state;
    Seconds now;
    const Verifier& verifier;
    ApplyResult operator()(const Claim& c) const { return apply_claim(state, c, now, verifier); }
    ApplyResult operator()(const Contest& c) const { return apply_contest(state, c, now, verifier); }
    ApplyResult operator()(const Finalize& f) const { return apply_finalize(state, f, now); }
    ApplyResult operator()(const Veto& v) const { return apply_veto(state, v, now, verifier); }
    ApplyResult operator()(const FinalizeVeto& f) const { return apply_finalize_veto(state, f, now); }
  };
  return std::visit(Visitor{state, now, verifier}, tx.body);
}

SupplyReport audit(const ChainState& state) {
  SupplyReport r;
  for (const auto& [_, amount] : state.balances) r.balances_total += amount;
  r.burned = state.burned;
  r.initial_supply = state.initial_supply;
  r.adjustment = state.supply_adjustment;
  r.conserved = static_cast<std::int64_t>(r.balances_total + r.burned) ==
                static_cast<std::int64_t>(r.initial_supply) + r.adjustment;
  return r;
}

nlohmann::json snapshot(const ChainState& state, const NameLookup& names, bool include_records) {
  auto name = [&](const PublicKey& k) { return names ? names(k) : k.hex(); };
  auto contestants_json = [&](const std::vector<Contestant>& list) {
    auto arr = nlohmann::json::array();
    for (const auto& c : list) arr.push_back({{"wallet", name(c.wallet)}, {"omega", to_hex(c.omega.omega())}});
    return arr;
  };

  nlohmann::json j;
  j["chain_id"] = state.chain_id;
  j["balances"] = nlohmann::json::object();
  for (const auto& [wallet, amount] : state.balances) j["balances"][name(wallet)] = amount;
  j["burned"] = state.burned;
  j["initial_supply"] = state.initial_supply;
  j["reward"] = state.reward;
  j["supply_adjustment"] = state.supply_adjustment;
  if (!include_records) return j;

  auto pois = nlohmann::json::array();
  for (const auto& [alpha, record] : state.poi_records) {
    const auto& in = record.poi.intent;
    nlohmann::json p{{"alpha", alpha.hex()},
                     {"sender", name(in.sender)},
                     {"recipient", name(in.recipient)},
                     {"amount", in.amount},
                     {"t0", in.t0},
                     {"t1", in.t1},
                     {"status", to_string(record.status)},
                     {"contestants", contestants_json(record.contestants)}};
    p["winner"] = record.winner ? nlohmann::json(name(*record.winner)) : nlohmann::json(nullptr);
    pois.push_back(std::move(p));
  }
  j["pois"] = std::move(pois);

  auto vetoes = nlohmann::json::array();
  for (const auto& [key, record] : state.veto_records) {
    nlohmann::json v{{"alpha_low", key.low.hex()},
                     {"alpha_high", key.high.hex()},
                     {"deadline", record.deadline},
                     {"forfeited", record.forfeited},
                     {"status", to_string(record.status)},
                     {"contestants", contestants_json(record.veto_contestants)}};
    v["winner"] = record.winner ? nlohmann::json(name(*record.winner)) : nlohmann::json(nullptr);
    vetoes.push_back(std::move(v));
  }
  j["vetoes"] = std::move(vetoes);
  return j;
}

}  // namespace dextt
