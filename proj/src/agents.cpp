#include "dextt/agents.hpp"

#include <algorithm>
#include <limits>

namespace dextt {

Amount spendable_balance(std::span<const SimChain> chains, const PublicKey& wallet) {
  Amount lowest = std::numeric_limits<Amount>::max();
  for (const auto& chain : chains) lowest = std::min(lowest, chain.state().balance_of(wallet));
  return chains.empty() ? 0 : lowest;
}

namespace {

void keep_lowest(std::optional<Contestant>& best, const Contestant& c) {
  if (!best || ranks_before(c, *best)) best = c;
}

}  // namespace

std::optional<Contestant> known_min_contestant(const SimChain& chain, const Signature& alpha) {
  std::optional<Contestant> best;
  if (const auto* record = chain.state().find_poi(alpha)) {
    for (const auto& c : record->contestants) keep_lowest(best, c);
  }
  for (const auto& tx : chain.mempool()) {
    if (const auto* contest = std::get_if<Contest>(&tx.body); contest && contest->poi.alpha == alpha) {
      keep_lowest(best, {contest->contestant, contest->omega});
    }
  }
  return best;
}

std::optional<Contestant> known_min_veto_contestant(const SimChain& chain, const VetoKey& key) {
  std::optional<Contestant> best;
  if (const auto* record = chain.state().find_veto(key)) {
    for (const auto& c : record->veto_contestants) keep_lowest(best, c);
  }
  for (const auto& tx : chain.mempool()) {
    if (const auto* veto = std::get_if<Veto>(&tx.body);
        veto && VetoKey::of(veto->alpha, veto->conflicting.alpha) == key) {
      keep_lowest(best, {veto->vetoer, veto->omega});
    }
  }
  return best;
}

// ---- clients ---------------------------------------------------------------

namespace {

bool has_overlapping_pending(std::span<const SimChain> chains, const PublicKey& sender, Seconds t0) {
  for (const auto& chain : chains) {
    for (const auto& [_, record] : chain.state().poi_records) {
      if (record.status == PoiStatus::pending && record.poi.intent.sender == sender &&
          record.poi.intent.t1 >= t0) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

ClientAction transfer_submissions(const Wallet& recipient, const ProofOfIntent& poi,
                                  std::size_t claim_chain, std::span<const SimChain> chains) {
  ClientAction act;
  act.poi = poi;
  act.claim = Submission{claim_chain, make_claim(recipient.key, poi)};
  auto finalize = make_finalize(recipient.key, poi.alpha);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    auto at = to_millis(poi.intent.t1 + chains[c].config().block_interval);
    act.finalizes.push_back({at, c, finalize});
  }
  return act;
}

ClientAction client_step(const Wallet& client, std::span<const Wallet> recipients,
                         const ClientWorkload& workload, std::span<const SimChain> chains, Millis now,
                         std::mt19937_64& rng) {
  std::uniform_int_distribution<Millis> think(to_millis(workload.think_min), to_millis(workload.think_max));

  std::vector<const Wallet*> others;
  for (const auto& r : recipients) {
    if (r.key.public_key != client.key.public_key) others.push_back(&r);
  }

  const Seconds t0 = ceil_seconds(now);
  const Amount balance = spendable_balance(chains, client.key.public_key);
  if (balance <= workload.reward || others.empty() || chains.empty() ||
      has_overlapping_pending(chains, client.key.public_key, t0)) {
    ClientAction idle;
    idle.next_wake = now + think(rng);
    return idle;
  }

  std::uniform_int_distribution<Amount> amount_dist(workload.reward + 1, balance);
  std::uniform_int_distribution<std::size_t> recipient_dist(0, others.size() - 1);
  std::uniform_int_distribution<std::size_t> chain_dist(0, chains.size() - 1);
  const Amount amount = amount_dist(rng);
  const Wallet& recipient = *others[recipient_dist(rng)];
  const std::size_t claim_chain = chain_dist(rng);

  auto poi = make_poi(client.key, recipient.key, amount, t0, t0 + workload.validity_length, workload.reward);
  auto act = transfer_submissions(recipient, poi, claim_chain, chains);
  Millis last_finalize = now;
  for (const auto& f : act.finalizes) last_finalize = std::max(last_finalize, f.at);
  act.next_wake = last_finalize + think(rng);
  return act;
}

// ---- observers ---------------------------------------------------------------

bool should_contest(const Contestant& mine, const std::optional<Contestant>& current_min,
                    ContestRule rule) {
  if (rule == ContestRule::always) return true;
  return !current_min || ranks_before(mine, *current_min);
}

std::vector<Submission> observer_step(Observer& observer, const ProofOfIntent& poi,
                                      std::span<const SimChain> chains, Millis now) {
  std::vector<Submission> out;
  if (!observer.contested.insert(poi.alpha).second) return out;
  if (now >= to_millis(poi.intent.t1)) return out;

  auto tx = make_contest(observer.wallet.key, poi);
  const Contestant mine{observer.wallet.key.public_key, std::get<Contest>(tx.body).omega};
  for (std::size_t c = 0; c < chains.size(); ++c) {
    if (const auto* record = chains[c].state().find_poi(poi.alpha);
        record && record->status != PoiStatus::pending) {
      continue;
    }
    if (should_contest(mine, known_min_contestant(chains[c], poi.alpha), observer.policy.contest_rule)) {
      out.push_back({c, tx});
    }
  }
  return out;
}

WatchdogAction watchdog_step(Observer& observer, const ProofOfIntent& a, const ProofOfIntent& b,
                             std::span<const SimChain> chains, Millis /*now*/) {
  WatchdogAction act;
  if (!conflicts(a, b)) return act;

  const auto key = VetoKey::of(a.alpha, b.alpha);
  auto [it, inserted] = observer.cases.try_emplace(key);
  auto& wc = it->second;
  if (inserted) {
    wc.first = a;
    wc.second = b;
    wc.omega = sign(observer.wallet.key, encode_veto_payload(a.alpha, b.alpha));
    wc.deadline = veto_deadline(a, b);
    wc.in_flight.assign(chains.size(), false);
    wc.settled.assign(chains.size(), false);
  }

  const Contestant mine{observer.wallet.key.public_key, wc.omega};
  for (std::size_t c = 0; c < chains.size(); ++c) {
    if (wc.settled[c] || wc.in_flight[c]) continue;
    const auto& state = chains[c].state();
    if (const auto* record = state.find_veto(key)) {
      bool joined = std::any_of(record->veto_contestants.begin(), record->veto_contestants.end(),
                                [&](const Contestant& x) { return x.wallet == mine.wallet; });
      bool beaten = observer.policy.contest_rule == ContestRule::winnable &&
                    !should_contest(mine, known_min_veto_contestant(chains[c], key), ContestRule::winnable);
      if (joined || beaten || record->status == VetoStatus::finalized) {
        wc.settled[c] = true;
        continue;
      }
    }
    if (!should_contest(mine, known_min_veto_contestant(chains[c], key), observer.policy.contest_rule)) {
      continue;
    }

    const ProofOfIntent* cited = nullptr;
    const ProofOfIntent* other = nullptr;
    if (state.find_poi(wc.first.alpha)) {
      cited = &wc.first;
      other = &wc.second;
    } else if (state.find_poi(wc.second.alpha)) {
      cited = &wc.second;
      other = &wc.first;
    } else {
      continue;  // neither PoI known here yet
    }
    act.vetoes.push_back({c, make_veto(observer.wallet.key, cited->alpha, *other)});
    wc.in_flight[c] = true;
  }

  if (!act.vetoes.empty() && !wc.finalize_scheduled) {
    wc.finalize_scheduled = true;
    Seconds interval = chains.empty() ? 0 : chains.front().config().block_interval;
    act.finalize_check_at = to_millis(wc.deadline + interval);
  }
  return act;
}

std::vector<Submission> finalize_veto_step(const Observer& observer, const VetoKey& key,
                                           std::span<const SimChain> chains) {
  std::vector<Submission> out;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const auto* record = chains[c].state().find_veto(key);
    if (!record || record->status != VetoStatus::open) continue;
    auto lead = std::min_element(record->veto_contestants.begin(), record->veto_contestants.end(),
                                 ranks_before);
    if (lead->wallet != observer.wallet.key.public_key) continue;
    out.push_back({c, make_finalize_veto(observer.wallet.key, key.low, key.high)});
  }
  return out;
}

ObserverReaction observe_block(Observer& observer, const BlockOutcome& outcome,
                               std::span<const SimChain> chains, Millis now) {
  ObserverReaction reaction;
  const bool watchdog = observer.policy.watchdog;
  const std::size_t chain_index = outcome.chain_id;

  std::vector<std::pair<ProofOfIntent, ProofOfIntent>> conflicts_found;
  auto note = [&](const ProofOfIntent& p) {
    auto& seen = observer.seen_by_sender[p.intent.sender];
    for (const auto& q : seen) {
      if (q.alpha == p.alpha) return;
    }
    for (const auto& q : seen) {
      if (conflicts(q, p)) conflicts_found.emplace_back(q, p);
    }
    seen.push_back(p);
  };

  for (std::size_t i = 0; i < outcome.block.transactions.size(); ++i) {
    const auto& tx = outcome.block.transactions[i];
    const auto& result = outcome.results[i];
    switch (tx.kind()) {
      case TxKind::claim:
      case TxKind::contest: {
        const auto& poi = tx.kind() == TxKind::claim ? std::get<Claim>(tx.body).poi
                                                     : std::get<Contest>(tx.body).poi;
        if (result.ok()) {
          note(poi);
          auto subs = observer_step(observer, poi, chains, now);
          for (auto& s : subs) reaction.submissions.push_back(std::move(s));
        } else if (result.error == TxError::conflicting_poi && result.conflict) {
          note(result.conflict->first);
          note(result.conflict->second);
        }
        break;
      }
      case TxKind::veto: {
        const auto& veto = std::get<Veto>(tx.body);
        const auto key = VetoKey::of(veto.alpha, veto.conflicting.alpha);
        if (tx.poster == observer.wallet.key.public_key) {
          auto it = observer.cases.find(key);
          if (it != observer.cases.end() && chain_index < it->second.in_flight.size()) {
            it->second.in_flight[chain_index] = false;
            if (result.ok()) it->second.settled[chain_index] = true;
          }
        } else if (result.ok() && chain_index < chains.size()) {
          if (const auto* record = chains[chain_index].state().find_poi(veto.alpha)) {
            note(record->poi);
            note(veto.conflicting);
          }
        }
        break;
      }
      case TxKind::finalize:
      case TxKind::finalize_veto:
        break;
    }
  }

  if (!watchdog) return reaction;

  auto run_case = [&](const ProofOfIntent& a, const ProofOfIntent& b) {
    auto act = watchdog_step(observer, a, b, chains, now);
    for (auto& v : act.vetoes) reaction.submissions.push_back(std::move(v));
    if (act.finalize_check_at) {
      reaction.finalize_checks.emplace_back(*act.finalize_check_at, VetoKey::of(a.alpha, b.alpha));
    }
  };
  for (const auto& [a, b] : conflicts_found) run_case(a, b);
  for (auto& [key, wc] : observer.cases) {
    bool open = false;
    for (std::size_t c = 0; c < wc.settled.size(); ++c) open = open || (!wc.settled[c] && !wc.in_flight[c]);
    if (open) run_case(wc.first, wc.second);
  }
  return reaction;
}

std::pair<ProofOfIntent, ProofOfIntent> make_double_spend(const KeyPair& sender, const KeyPair& first,
                                                          const KeyPair& second, Amount amount_first,
                                                          Amount amount_second, Seconds t0_first,
                                                          Seconds t1_first, Seconds t0_second,
                                                          Seconds t1_second, Amount reward) {
  auto a = make_poi(sender, first, amount_first, t0_first, t1_first, reward);
  auto b = make_poi(sender, second, amount_second, t0_second, t1_second, reward);
  if (!conflicts(a, b)) throw ProtocolError("double-spend PoIs do not overlap");
  return {std::move(a), std::move(b)};
}

}  // namespace dextt
