#include "support.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace dextt::testing {

std::size_t left_to_right_minima(std::span<const double> values) {
  std::size_t count = 0;
  double best = std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (v < best) {
      best = v;
      ++count;
    }
  }
  return count;
}

namespace {

KeyPair key(std::uint64_t seed, const std::string& name) {
  return keypair_from_label("support/" + std::to_string(seed) + "/" + name);
}

}  // namespace

TransactionSet random_transaction_set(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };

  TransactionSet set;
  const auto wallet_count = static_cast<std::size_t>(pick(3, 7));
  std::vector<KeyPair> wallets;
  for (std::size_t i = 0; i < wallet_count; ++i) {
    wallets.push_back(key(seed, "w" + std::to_string(i)));
    set.genesis[wallets.back().public_key] = static_cast<Amount>(pick(0, 60));
  }
  std::vector<KeyPair> observers;
  for (std::size_t i = 0, n = static_cast<std::size_t>(pick(0, 4)); i < n; ++i) {
    observers.push_back(key(seed, "o" + std::to_string(i)));
  }

  // One PoI per sender at most, paid from its genesis balance, so no two
  // PoIs conflict and every claim is admissible in any order.
  set.open_time = 20;
  set.close_time = 200;
  for (const auto& sender : wallets) {
    const Amount balance = set.genesis[sender.public_key];
    if (balance < 2 || pick(0, 3) == 0) continue;
    const auto& recipient = wallets[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(wallet_count) - 1))];
    if (recipient.public_key == sender.public_key) continue;
    const auto amount = static_cast<Amount>(pick(2, static_cast<std::int64_t>(balance)));
    const Seconds t0 = pick(0, set.open_time);
    const Seconds t1 = pick(set.open_time + 1, set.close_time - 1);
    auto poi = make_poi(sender, recipient, amount, t0, t1);

    bool claimed = pick(0, 4) != 0;
    if (claimed) set.open_phase.push_back(make_claim(recipient, poi));
    std::size_t contests = 0;
    for (const auto& o : observers) {
      if (pick(0, 1)) {
        set.open_phase.push_back(make_contest(o, poi));
        ++contests;
      }
    }
    if (claimed || contests > 0) set.close_phase.push_back(make_finalize(recipient, poi.alpha));
  }
  return set;
}

ChainState apply_shuffled(const TransactionSet& set, std::mt19937_64& rng, std::vector<std::string>* errors) {
  auto state = ChainState::genesis(0, set.genesis);
  auto phase = [&](std::vector<Transaction> txs, Seconds now) {
    std::shuffle(txs.begin(), txs.end(), rng);
    for (const auto& tx : txs) {
      auto r = apply(state, tx, now);
      if (!r.ok() && errors) errors->push_back(std::string(to_string(tx.kind())) + ": " + std::string(to_string(r.error)));
    }
  };
  phase(set.open_phase, set.open_time);
  phase(set.close_phase, set.close_time);
  return state;
}

bool same_outcome(const ChainState& a, const ChainState& b) {
  if (a.balances != b.balances || a.burned != b.burned || a.supply_adjustment != b.supply_adjustment) return false;
  if (a.poi_records.size() != b.poi_records.size() || a.veto_records.size() != b.veto_records.size()) return false;
  auto as_set = [](const std::vector<Contestant>& v) {
    std::set<std::pair<PublicKey, Signature>> s;
    for (const auto& c : v) s.emplace(c.wallet, c.omega);
    return s;
  };
  for (const auto& [alpha, ra] : a.poi_records) {
    const auto* rb = b.find_poi(alpha);
    if (!rb || ra.status != rb->status || ra.winner != rb->winner || as_set(ra.contestants) != as_set(rb->contestants)) {
      return false;
    }
  }
  for (const auto& [k, va] : a.veto_records) {
    const auto* vb = b.find_veto(k);
    if (!vb || va.status != vb->status || va.winner != vb->winner || va.deadline != vb->deadline ||
        va.forfeited != vb->forfeited || as_set(va.veto_contestants) != as_set(vb->veto_contestants)) {
      return false;
    }
  }
  return true;
}

std::pair<ChainState, ChainState> veto_in_both_orders(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };

  auto sender = key(seed, "adversary");
  auto ra = key(seed, "ra");
  auto rb = key(seed, "rb");
  auto bystander = key(seed, "bystander");
  const auto balance = static_cast<Amount>(pick(4, 100));
  std::map<PublicKey, Amount> genesis{{sender.public_key, balance}, {bystander.public_key, static_cast<Amount>(pick(0, 50))}};

  const Seconds t0a = pick(0, 10);
  const Seconds t1a = t0a + pick(30, 90);
  const Seconds t0b = pick(t0a, t1a - 1);
  const Seconds t1b = t0b + pick(30, 90);
  auto a = make_poi(sender, ra, static_cast<Amount>(pick(2, static_cast<std::int64_t>(balance))), t0a, t1a);
  auto b = make_poi(sender, rb, static_cast<Amount>(pick(2, static_cast<std::int64_t>(balance))), t0b, t1b);

  std::vector<KeyPair> vetoers;
  for (std::size_t i = 0, n = static_cast<std::size_t>(pick(1, 4)); i < n; ++i) {
    vetoers.push_back(key(seed, "v" + std::to_string(i)));
  }
  const Seconds now = std::max(t0a, t0b);
  const Seconds after = veto_deadline(a, b) + 1;

  auto one = [&](const ProofOfIntent& first, const ProofOfIntent& second, bool reverse_vetoers) {
    auto state = ChainState::genesis(0, genesis);
    apply(state, make_claim(first.intent.recipient == ra.public_key ? ra : rb, first), now);
    auto order = vetoers;
    if (reverse_vetoers) std::reverse(order.begin(), order.end());
    for (const auto& v : order) apply(state, make_veto(v, first.alpha, second), now);
    apply(state, make_finalize(ra, a.alpha), after);
    apply(state, make_finalize(rb, b.alpha), after);
    apply(state, make_finalize_veto(vetoers.front(), a.alpha, b.alpha), after);
    return state;
  };
  return {one(a, b, false), one(b, a, true)};
}

}  // namespace dextt::testing
