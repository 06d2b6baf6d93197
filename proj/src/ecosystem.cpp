#include "dextt/ecosystem.hpp"

#include <algorithm>
#include <memory>
#include <queue>
#include <sstream>
#include <tuple>
#include <variant>

namespace dextt {

void validate(const EcosystemConfig& config) {
  if (config.chains.empty()) throw ConfigError("chains", "at least one chain is required");
  for (std::size_t i = 0; i < config.chains.size(); ++i) {
    try {
      validate(config.chains[i]);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("chains[" + std::to_string(i) + "]", e.what());
    }
  }
  if (config.duration < 0) throw ConfigError("duration", "must be non-negative");
  if (config.validity_length <= 0) throw ConfigError("validity_length", "must be positive");
  if (config.workload.think_min <= 0 || config.workload.think_max < config.workload.think_min) {
    throw ConfigError("clients.think_time", "bounds must satisfy 0 < min <= max");
  }
  const auto& delay = config.observer_policy.observation_delay;
  if (delay.min < 0 || delay.max < delay.min) {
    throw ConfigError("observers.delay", "bounds must satisfy 0 <= min <= max");
  }

  std::map<std::string, const WalletSpec*> names;
  for (std::size_t i = 0; i < config.wallets.size(); ++i) {
    const auto& w = config.wallets[i];
    if (w.name.empty()) throw ConfigError("wallets[" + std::to_string(i) + "].name", "must not be empty");
    if (!names.emplace(w.name, &w).second) {
      throw ConfigError("wallets[" + std::to_string(i) + "].name", "duplicate wallet '" + w.name + "'");
    }
  }
  auto require_wallet = [&](const std::string& path, const std::string& name) {
    if (!names.count(name)) throw ConfigError(path, "unknown wallet '" + name + "'");
  };
  for (std::size_t i = 0; i < config.observer_wallets.size(); ++i) {
    require_wallet("observers.wallets[" + std::to_string(i) + "]", config.observer_wallets[i]);
  }
  for (std::size_t i = 0; i < config.transfers.size(); ++i) {
    const auto& t = config.transfers[i];
    const auto path = "transfers[" + std::to_string(i) + "]";
    require_wallet(path + ".sender", t.sender);
    require_wallet(path + ".recipient", t.recipient);
    if (t.claim_chain >= config.chains.size()) throw ConfigError(path + ".claim_chain", "no such chain");
    if (t.amount <= config.reward) throw ConfigError(path + ".amount", "must exceed the reward");
    if (t.t0 && t.t1 && *t.t0 >= *t.t1) throw ConfigError(path + ".t1", "must be greater than t0");
  }
  for (std::size_t i = 0; i < config.double_spends.size(); ++i) {
    const auto& d = config.double_spends[i];
    const auto path = "double_spends[" + std::to_string(i) + "]";
    require_wallet(path + ".sender", d.sender);
    for (std::size_t k = 0; k < 2; ++k) {
      require_wallet(path + ".recipients[" + std::to_string(k) + "]", d.recipients[k]);
      if (d.claim_chains[k] >= config.chains.size()) {
        throw ConfigError(path + ".claim_chains[" + std::to_string(k) + "]", "no such chain");
      }
      if (d.amounts[k] <= config.reward) {
        throw ConfigError(path + ".amounts[" + std::to_string(k) + "]", "must exceed the reward");
      }
      if (d.t0[k] >= d.t1[k]) throw ConfigError(path + ".windows[" + std::to_string(k) + "]", "empty window");
    }
    if (!(d.t0[0] <= d.t1[1] && d.t0[1] <= d.t1[0])) {
      throw ConfigError(path + ".windows", "windows must overlap");
    }
  }
}

std::vector<ChainConfig> uniform_chains(std::size_t count, Seconds block_interval,
                                        std::size_t max_txs_per_block, double jitter) {
  std::vector<ChainConfig> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].chain_id = static_cast<ChainId>(i);
    out[i].block_interval = block_interval;
    out[i].max_txs_per_block = max_txs_per_block;
    out[i].jitter = jitter;
  }
  return out;
}

std::string RunReport::name_of(const PublicKey& key) const {
  auto it = names.find(key);
  return it == names.end() ? key.hex() : it->second;
}

NameLookup RunReport::name_lookup() const {
  return [this](const PublicKey& k) { return name_of(k); };
}

// ---- consistency ---------------------------------------------------------------

namespace {

template <class States>
TransferOutcome classify(const States& states, const Signature& alpha) {
  TransferOutcome out;
  std::size_t finalized = 0;
  std::optional<std::optional<PublicKey>> first_winner;
  for (const ChainState& s : states) {
    const auto* record = s.find_poi(alpha);
    out.status.push_back(record ? std::optional(record->status) : std::nullopt);
    out.winners.push_back(record ? record->winner : std::nullopt);
    if (record && record->status == PoiStatus::finalized) {
      ++finalized;
      if (!first_winner) {
        first_winner = record->winner;
      } else if (*first_winner != record->winner) {
        out.corrupted = true;
      }
    }
  }
  if (finalized > 0 && finalized < out.status.size()) out.corrupted = true;
  return out;
}

template <class States>
void resync(States& states, std::span<const PublicKey> wallets) {
  for (const auto& wallet : wallets) {
    std::vector<Amount> values;
    for (const ChainState& s : states) values.push_back(s.balance_of(wallet));
    Amount chosen = values.front();
    std::size_t best = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto n = static_cast<std::size_t>(std::count(values.begin(), values.end(), values[i]));
      if (n > best) {
        best = n;
        chosen = values[i];
      }
    }
    std::size_t i = 0;
    for (ChainState& s : states) {
      if (values[i] != chosen) {
        s.supply_adjustment += static_cast<std::int64_t>(chosen) - static_cast<std::int64_t>(values[i]);
        s.balances[wallet] = chosen;
      }
      ++i;
    }
  }
}

// Adapts a vector of SimChains to a range of ChainState references.
struct ChainStates {
  std::vector<SimChain>* chains;
  struct It {
    std::vector<SimChain>::iterator it;
    ChainState& operator*() const { return it->mutable_state(); }
    It& operator++() { ++it; return *this; }
    bool operator!=(const It& o) const { return it != o.it; }
  };
  It begin() const { return {chains->begin()}; }
  It end() const { return {chains->end()}; }
};

}  // namespace

TransferOutcome classify_transfer(std::span<const ChainState> states, const Signature& alpha) {
  return classify(states, alpha);
}

void resync_to_majority(std::span<ChainState> states, std::span<const PublicKey> wallets) {
  resync(states, wallets);
}

std::vector<Inconsistency> check_consistency(std::span<const ChainState> states, const NameLookup& names) {
  std::vector<Inconsistency> out;
  if (states.empty()) return out;
  std::set<PublicKey> wallets;
  for (const auto& s : states) {
    for (const auto& [w, _] : s.balances) wallets.insert(w);
  }
  for (const auto& w : wallets) {
    std::vector<Amount> values;
    for (const auto& s : states) values.push_back(s.balance_of(w));
    if (std::all_of(values.begin(), values.end(), [&](Amount v) { return v == values.front(); })) continue;

    Amount majority = values.front();
    std::size_t best = 0;
    for (auto v : values) {
      auto n = static_cast<std::size_t>(std::count(values.begin(), values.end(), v));
      if (n > best) {
        best = n;
        majority = v;
      }
    }
    Inconsistency inc;
    inc.wallet = names ? names(w) : w.hex();
    inc.balances = values;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] != majority) inc.divergent_chains.push_back(states[i].chain_id);
    }
    out.push_back(std::move(inc));
  }
  return out;
}

std::size_t count_corrupted(const RunReport& report) {
  return static_cast<std::size_t>(std::count_if(report.transfers.begin(), report.transfers.end(),
                                                [](const TransferEntry& t) { return t.corrupted; }));
}

double mean_contests_per_chain(const RunReport& report) {
  double total = 0.0;
  std::size_t counted = 0;
  for (const auto& t : report.transfers) {
    bool everywhere = std::none_of(t.status_per_chain.begin(), t.status_per_chain.end(),
                                   [](const std::string& s) { return s == "unknown"; });
    if (!everywhere || t.contests_per_chain.empty()) continue;
    double sum = 0.0;
    for (auto c : t.contests_per_chain) sum += static_cast<double>(c);
    total += sum / static_cast<double>(t.contests_per_chain.size());
    ++counted;
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

// ---- engine --------------------------------------------------------------------

namespace {

struct BlockDue {
  std::size_t chain;
};
struct ClientWake {
  std::size_t client;
};
struct ObserveBlock {
  std::size_t observer;
  std::shared_ptr<const BlockOutcome> outcome;
};
struct SubmitTx {
  std::size_t chain;
  Transaction tx;
};
struct FinalizeVetoCheck {
  std::size_t observer;
  VetoKey key;
};
struct TransferAudit {
  Signature alpha;
};
struct ScriptStart {
  std::size_t index;
  int leg;  // -1 for a plain transfer, 0/1 for a double-spend leg
};

using EventKind =
    std::variant<BlockDue, ClientWake, ObserveBlock, SubmitTx, FinalizeVetoCheck, TransferAudit, ScriptStart>;

struct SimEvent {
  Millis fire_at = 0;
  std::uint64_t sequence = 0;
  EventKind kind;
};

struct FiresLater {
  bool operator()(const SimEvent& a, const SimEvent& b) const {
    return std::tie(a.fire_at, a.sequence) > std::tie(b.fire_at, b.sequence);
  }
};

class Engine {
 public:
  explicit Engine(const EcosystemConfig& config);
  RunReport run();

 private:
  void schedule(Millis at, EventKind kind);
  Millis stop_time() const { return std::max(to_millis(config_.duration), horizon_); }
  Millis audit_time(const ProofOfIntent& poi) const {
    return to_millis(poi.intent.t1 + 4 * max_interval_) + 500;
  }
  const Wallet& wallet(const std::string& name) const { return wallets_.at(wallet_index_.at(name)); }

  void start_transfer(const Wallet& recipient, const ProofOfIntent& poi, std::size_t claim_chain,
                      bool double_spend);
  void submit(const Submission& s) { chains_[s.chain].submit(s.tx); }
  void audit(const Signature& alpha, bool final_pass);

  void handle(const BlockDue& e);
  void handle(const ClientWake& e);
  void handle(const ObserveBlock& e);
  void handle(const SubmitTx& e) { chains_[e.chain].submit(e.tx); }
  void handle(const FinalizeVetoCheck& e);
  void handle(const TransferAudit& e) { audit(e.alpha, false); }
  void handle(const ScriptStart& e);

  const EcosystemConfig& config_;
  CachingVerifier verifier_;
  std::vector<SimChain> chains_;
  std::vector<Wallet> wallets_;
  std::map<std::string, std::size_t> wallet_index_;
  std::vector<Wallet> clients_;
  std::vector<Observer> observers_;
  std::vector<std::pair<ProofOfIntent, ProofOfIntent>> double_spend_pois_;
  std::mt19937_64 rng_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, FiresLater> queue_;
  std::uint64_t next_sequence_ = 0;
  Seconds max_interval_ = 0;
  Millis horizon_ = 0;
  Millis now_ = 0;
  std::map<Signature, std::size_t> ledger_index_;
  std::vector<TransferEntry> ledger_;
  TxTally tally_;
  std::vector<std::string> block_log_;
};

Engine::Engine(const EcosystemConfig& config) : config_(config), rng_(config.seed) {
  validate(config_);

  auto make_wallet = [&](const std::string& name, const std::string& label) {
    auto key_label = label.empty() ? "dextt/" + std::to_string(config_.seed) + "/" + name : label;
    wallet_index_[name] = wallets_.size();
    wallets_.push_back({name, keypair_from_label(key_label)});
  };

  std::map<PublicKey, Amount> balances;
  for (const auto& w : config_.wallets) {
    make_wallet(w.name, w.key_label);
    balances[wallets_.back().key.public_key] = w.balance;
  }
  for (std::size_t i = 0; i < config_.client_count; ++i) {
    make_wallet("client-" + std::to_string(i), "");
    balances[wallets_.back().key.public_key] = config_.client_balance;
    clients_.push_back(wallets_.back());
  }
  for (const auto& name : config_.observer_wallets) {
    observers_.push_back(Observer{wallet(name), config_.observer_policy, {}, {}, {}});
  }
  for (std::size_t i = 0; i < config_.observer_count; ++i) {
    make_wallet("observer-" + std::to_string(i), "");
    balances[wallets_.back().key.public_key] = 0;
    observers_.push_back(Observer{wallets_.back(), config_.observer_policy, {}, {}, {}});
  }

  chains_.reserve(config_.chains.size());
  for (std::size_t i = 0; i < config_.chains.size(); ++i) {
    auto cc = config_.chains[i];
    cc.chain_id = static_cast<ChainId>(i);
    if (cc.jitter > 0.0 && cc.jitter_seed == 0) cc.jitter_seed = config_.seed * 1000003u + i;
    max_interval_ = std::max(max_interval_, cc.block_interval);
    chains_.emplace_back(cc, ChainState::genesis(cc.chain_id, balances, config_.reward), verifier_);
  }

  for (const auto& d : config_.double_spends) {
    double_spend_pois_.push_back(make_double_spend(
        wallet(d.sender).key, wallet(d.recipients[0]).key, wallet(d.recipients[1]).key, d.amounts[0],
        d.amounts[1], d.t0[0], d.t1[0], d.t0[1], d.t1[1], config_.reward));
  }
}

void Engine::schedule(Millis at, EventKind kind) {
  if (!std::holds_alternative<BlockDue>(kind)) {
    horizon_ = std::max(horizon_, at + to_millis(2 * max_interval_));
  }
  queue_.push(SimEvent{at, next_sequence_++, std::move(kind)});
}

RunReport Engine::run() {
  const Millis duration_ms = to_millis(config_.duration);
  for (std::size_t c = 0; c < chains_.size(); ++c) schedule(to_millis(chains_[c].next_block_time()), BlockDue{c});
  std::uniform_int_distribution<Millis> first_wake(0, to_millis(config_.workload.think_max));
  for (std::size_t i = 0; i < clients_.size(); ++i) {
    auto at = first_wake(rng_);
    if (at < duration_ms) schedule(at, ClientWake{i});
  }
  for (std::size_t i = 0; i < config_.transfers.size(); ++i) {
    if (config_.transfers[i].submit_at < duration_ms) schedule(config_.transfers[i].submit_at, ScriptStart{i, -1});
  }
  for (std::size_t i = 0; i < config_.double_spends.size(); ++i) {
    for (int leg = 0; leg < 2; ++leg) {
      auto at = config_.double_spends[i].submit_at[static_cast<std::size_t>(leg)];
      if (at < duration_ms) schedule(at, ScriptStart{i, leg});
    }
  }

  while (!queue_.empty() && queue_.top().fire_at <= stop_time()) {
    SimEvent ev = queue_.top();
    queue_.pop();
    now_ = ev.fire_at;
    std::visit([this](const auto& e) { handle(e); }, ev.kind);
  }

  RunReport report;
  report.seed = config_.seed;
  report.duration = config_.duration;
  report.end_time = now_;
  report.observer_count = observers_.size();
  for (const auto& w : wallets_) report.names[w.key.public_key] = w.name;
  for (const auto& e : ledger_) audit(e.alpha, true);
  for (const auto& chain : chains_) report.final_states.push_back(chain.state());
  report.transfers = ledger_;
  report.tally = tally_;
  report.inconsistencies = check_consistency(report.final_states, report.name_lookup());
  for (const auto& s : report.final_states) report.supply.push_back(dextt::audit(s));
  report.block_log = std::move(block_log_);
  return report;
}

void Engine::start_transfer(const Wallet& recipient, const ProofOfIntent& poi, std::size_t claim_chain,
                            bool double_spend) {
  auto act = transfer_submissions(recipient, poi, claim_chain, chains_);
  submit(*act.claim);
  for (auto& f : act.finalizes) schedule(f.at, SubmitTx{f.chain, std::move(f.tx)});

  TransferEntry entry;
  entry.alpha = poi.alpha;
  auto name_of = [&](const PublicKey& k) {
    for (const auto& w : wallets_) {
      if (w.key.public_key == k) return w.name;
    }
    return k.hex();
  };
  entry.sender = name_of(poi.intent.sender);
  entry.recipient = recipient.name;
  entry.amount = poi.intent.amount;
  entry.t0 = poi.intent.t0;
  entry.t1 = poi.intent.t1;
  entry.claim_chain = claim_chain;
  entry.double_spend = double_spend;
  ledger_index_[poi.alpha] = ledger_.size();
  ledger_.push_back(std::move(entry));
  schedule(audit_time(poi), TransferAudit{poi.alpha});
}

void Engine::audit(const Signature& alpha, bool final_pass) {
  auto& entry = ledger_.at(ledger_index_.at(alpha));
  ChainStates states{&chains_};
  auto outcome = classify(states, alpha);

  entry.status_per_chain.clear();
  entry.contests_per_chain.clear();
  entry.winner.reset();
  for (std::size_t c = 0; c < chains_.size(); ++c) {
    entry.status_per_chain.emplace_back(outcome.status[c] ? to_string(*outcome.status[c]) : "unknown");
    const auto* record = chains_[c].state().find_poi(alpha);
    entry.contests_per_chain.push_back(record ? record->contestants.size() : 0);
    if (!entry.winner && outcome.winners[c]) {
      for (const auto& w : wallets_) {
        if (w.key.public_key == *outcome.winners[c]) entry.winner = w.name;
      }
    }
  }
  entry.corrupted = entry.corrupted || outcome.corrupted;

  if (!final_pass && outcome.corrupted && config_.resync_corrupted) {
    std::vector<PublicKey> touched;
    const auto* any = static_cast<const PoiRecord*>(nullptr);
    for (const auto& chain : chains_) {
      if ((any = chain.state().find_poi(alpha))) break;
    }
    touched.push_back(any->poi.intent.sender);
    touched.push_back(any->poi.intent.recipient);
    for (const auto& w : outcome.winners) {
      if (w) touched.push_back(*w);
    }
    resync(states, touched);
  }
}

void Engine::handle(const BlockDue& e) {
  auto& chain = chains_[e.chain];
  auto outcome = std::make_shared<BlockOutcome>(chain.produce_block(chain.next_block_time()));
  for (std::size_t i = 0; i < outcome->block.transactions.size(); ++i) {
    auto k = static_cast<std::size_t>(outcome->block.transactions[i].kind());
    ++tally_.included[k];
    if (outcome->results[i].ok()) ++tally_.accepted[k];
  }
  if (config_.record_blocks) block_log_.push_back(block_log_line(*outcome));
  if (!outcome->block.transactions.empty()) {
    const auto& delay = config_.observer_policy.observation_delay;
    std::uniform_int_distribution<Millis> draw(delay.min, delay.max);
    std::shared_ptr<const BlockOutcome> shared = outcome;
    for (std::size_t o = 0; o < observers_.size(); ++o) schedule(now_ + draw(rng_), ObserveBlock{o, shared});
  }
  schedule(to_millis(chain.next_block_time()), BlockDue{e.chain});
}

void Engine::handle(const ClientWake& e) {
  const Millis duration_ms = to_millis(config_.duration);
  if (now_ >= duration_ms) return;
  auto act = client_step(clients_[e.client], clients_, config_.workload, chains_, now_, rng_);
  if (act.poi) {
    const auto& recipient_key = act.poi->intent.recipient;
    const auto it = std::find_if(clients_.begin(), clients_.end(),
                                 [&](const Wallet& w) { return w.key.public_key == recipient_key; });
    start_transfer(*it, *act.poi, act.claim->chain, false);
  }
  if (act.next_wake < duration_ms) schedule(act.next_wake, ClientWake{e.client});
}

void Engine::handle(const ObserveBlock& e) {
  auto reaction = observe_block(observers_[e.observer], *e.outcome, chains_, now_);
  for (const auto& s : reaction.submissions) submit(s);
  for (const auto& [at, key] : reaction.finalize_checks) schedule(std::max(at, now_), FinalizeVetoCheck{e.observer, key});
}

void Engine::handle(const FinalizeVetoCheck& e) {
  for (const auto& s : finalize_veto_step(observers_[e.observer], e.key, chains_)) submit(s);
}

void Engine::handle(const ScriptStart& e) {
  if (e.leg < 0) {
    const auto& t = config_.transfers[e.index];
    const Seconds t0 = t.t0.value_or(ceil_seconds(now_));
    const Seconds t1 = t.t1.value_or(t0 + config_.validity_length);
    auto poi = make_poi(wallet(t.sender).key, wallet(t.recipient).key, t.amount, t0, t1, config_.reward);
    start_transfer(wallet(t.recipient), poi, t.claim_chain, false);
    return;
  }
  const auto& d = config_.double_spends[e.index];
  const auto leg = static_cast<std::size_t>(e.leg);
  const auto& poi = leg == 0 ? double_spend_pois_[e.index].first : double_spend_pois_[e.index].second;
  start_transfer(wallet(d.recipients[leg]), poi, d.claim_chains[leg], true);
}

}  // namespace

RunReport run(const EcosystemConfig& config) {
  Engine engine(config);
  return engine.run();
}

// ---- serialization -------------------------------------------------------------

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json j;
  j["seed"] = report.seed;
  j["duration"] = report.duration;
  j["end_time_ms"] = report.end_time;
  j["observer_count"] = report.observer_count;

  auto names = report.name_lookup();
  auto chains = nlohmann::json::array();
  for (const auto& s : report.final_states) chains.push_back(snapshot(s, names));
  j["chains"] = std::move(chains);

  auto transfers = nlohmann::json::array();
  auto corrupted = nlohmann::json::array();
  for (const auto& t : report.transfers) {
    nlohmann::json e{{"alpha", t.alpha.hex()},
                     {"sender", t.sender},
                     {"recipient", t.recipient},
                     {"amount", t.amount},
                     {"t0", t.t0},
                     {"t1", t.t1},
                     {"claim_chain", t.claim_chain},
                     {"status", t.status_per_chain},
                     {"contests", t.contests_per_chain},
                     {"corrupted", t.corrupted},
                     {"double_spend", t.double_spend}};
    e["winner"] = t.winner ? nlohmann::json(*t.winner) : nlohmann::json(nullptr);
    transfers.push_back(std::move(e));
    if (t.corrupted) corrupted.push_back(t.alpha.hex());
  }
  j["transfers"] = std::move(transfers);
  j["corrupted"] = std::move(corrupted);
  j["corrupted_count"] = count_corrupted(report);

  nlohmann::json tally;
  for (std::size_t k = 0; k < report.tally.included.size(); ++k) {
    tally[std::string(to_string(static_cast<TxKind>(k)))] = {{"included", report.tally.included[k]},
                                                              {"accepted", report.tally.accepted[k]}};
  }
  j["tally"] = std::move(tally);
  j["mean_contests_per_chain"] = mean_contests_per_chain(report);

  auto inconsistencies = nlohmann::json::array();
  for (const auto& inc : report.inconsistencies) {
    inconsistencies.push_back(
        {{"wallet", inc.wallet}, {"balances", inc.balances}, {"divergent_chains", inc.divergent_chains}});
  }
  j["inconsistencies"] = std::move(inconsistencies);

  auto supply = nlohmann::json::array();
  for (const auto& s : report.supply) {
    supply.push_back({{"balances_total", s.balances_total},
                      {"burned", s.burned},
                      {"initial_supply", s.initial_supply},
                      {"adjustment", s.adjustment},
                      {"conserved", s.conserved}});
  }
  j["supply"] = std::move(supply);
  return j;
}

std::string ledger_csv(const RunReport& report) {
  std::ostringstream out;
  out << "alpha,sender,recipient,amount,t0,t1,claim_chain,winner,contests_per_chain,status_per_chain,"
         "double_spend,corrupted\n";
  auto join = [](const auto& values) {
    std::ostringstream s;
    for (std::size_t i = 0; i < values.size(); ++i) s << (i ? ";" : "") << values[i];
    return s.str();
  };
  for (const auto& t : report.transfers) {
    out << t.alpha.hex() << ',' << t.sender << ',' << t.recipient << ',' << t.amount << ',' << t.t0 << ','
        << t.t1 << ',' << t.claim_chain << ',' << t.winner.value_or("") << ',' << join(t.contests_per_chain)
        << ',' << join(t.status_per_chain) << ',' << (t.double_spend ? 1 : 0) << ',' << (t.corrupted ? 1 : 0)
        << '\n';
  }
  return out.str();
}

}  // namespace dextt
