#include "dextt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dextt {

using nlohmann::json;

ConfigParseError::ConfigParseError(const std::string& source, std::size_t line, std::size_t column,
                                   const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + (column ? ":" + std::to_string(column) : "") +
                         ": " + message),
      line_(line), column_(column) {}

namespace {

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(at(path, key), "unknown key");
  }
}

std::uint64_t as_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) throw ConfigError(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::int64_t as_i64(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<std::int64_t>();
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  return j;
}

Millis seconds_to_millis(const json& j, const std::string& path) {
  double s = as_double(j, path);
  if (s < 0) throw ConfigError(path, "must be non-negative");
  return static_cast<Millis>(std::llround(s * 1000.0));
}

template <class F>
void if_has(const json& obj, const std::string& path, const char* key, F&& f) {
  if (auto it = obj.find(key); it != obj.end()) f(*it, at(path, key));
}

void read_chains(const json& j, const std::string& path, EcosystemConfig& eco) {
  check_keys(j, path, {"count", "block_interval", "max_txs_per_block", "jitter", "clock_skew"});
  std::size_t count = 3;
  Seconds interval = 13;
  std::size_t cap = 100;
  double jitter = 0.0;
  if_has(j, path, "count", [&](const json& v, const std::string& p) {
    count = as_u64(v, p);
    if (count < 1) throw ConfigError(p, "at least one chain is required");
  });
  if_has(j, path, "block_interval", [&](const json& v, const std::string& p) { interval = as_i64(v, p); });
  if_has(j, path, "max_txs_per_block", [&](const json& v, const std::string& p) { cap = as_u64(v, p); });
  if_has(j, path, "jitter", [&](const json& v, const std::string& p) { jitter = as_double(v, p); });
  eco.chains = uniform_chains(count, interval, cap, jitter);
  if_has(j, path, "clock_skew", [&](const json& v, const std::string& p) {
    as_array(v, p);
    if (v.size() != count) throw ConfigError(p, "needs one entry per chain");
    for (std::size_t i = 0; i < count; ++i) eco.chains[i].clock_skew = as_i64(v[i], at(p, i));
  });
}

std::pair<Millis, Millis> read_range(const json& j, const std::string& path) {
  as_array(j, path);
  if (j.size() != 2) throw ConfigError(path, "expected [min, max]");
  return {seconds_to_millis(j[0], at(path, 0)), seconds_to_millis(j[1], at(path, 1))};
}

ScriptedTransfer read_transfer(const json& j, const std::string& path) {
  check_keys(j, path, {"sender", "recipient", "amount", "t0", "t1", "claim_chain", "submit_at"});
  for (const char* key : {"sender", "recipient", "amount"}) {
    if (!j.contains(key)) throw ConfigError(at(path, key), "required");
  }
  ScriptedTransfer t;
  t.sender = as_string(j["sender"], at(path, "sender"));
  t.recipient = as_string(j["recipient"], at(path, "recipient"));
  t.amount = as_u64(j["amount"], at(path, "amount"));
  if_has(j, path, "t0", [&](const json& v, const std::string& p) { t.t0 = as_i64(v, p); });
  if_has(j, path, "t1", [&](const json& v, const std::string& p) { t.t1 = as_i64(v, p); });
  if_has(j, path, "claim_chain", [&](const json& v, const std::string& p) { t.claim_chain = as_u64(v, p); });
  if_has(j, path, "submit_at", [&](const json& v, const std::string& p) { t.submit_at = seconds_to_millis(v, p); });
  return t;
}

DoubleSpendScript read_double_spend(const json& j, const std::string& path) {
  check_keys(j, path, {"sender", "legs"});
  if (!j.contains("sender")) throw ConfigError(at(path, "sender"), "required");
  if (!j.contains("legs")) throw ConfigError(at(path, "legs"), "required");
  DoubleSpendScript d;
  d.sender = as_string(j["sender"], at(path, "sender"));
  const auto& legs = as_array(j["legs"], at(path, "legs"));
  if (legs.size() != 2) throw ConfigError(at(path, "legs"), "expected exactly two legs");
  for (std::size_t k = 0; k < 2; ++k) {
    const auto lp = at(at(path, "legs"), k);
    const auto& leg = legs[k];
    check_keys(leg, lp, {"recipient", "amount", "t0", "t1", "claim_chain", "submit_at"});
    for (const char* key : {"recipient", "amount", "t0", "t1"}) {
      if (!leg.contains(key)) throw ConfigError(at(lp, key), "required");
    }
    d.recipients[k] = as_string(leg["recipient"], at(lp, "recipient"));
    d.amounts[k] = as_u64(leg["amount"], at(lp, "amount"));
    d.t0[k] = as_i64(leg["t0"], at(lp, "t0"));
    d.t1[k] = as_i64(leg["t1"], at(lp, "t1"));
    if_has(leg, lp, "claim_chain", [&](const json& v, const std::string& p) { d.claim_chains[k] = as_u64(v, p); });
    if_has(leg, lp, "submit_at", [&](const json& v, const std::string& p) { d.submit_at[k] = seconds_to_millis(v, p); });
  }
  return d;
}

void read_gas(const json& j, const std::string& path, GasTable& gas) {
  check_keys(j, path, {"claim", "contest", "finalize", "veto", "finalize_veto"});
  auto one = [&](const char* key, GasCost& cost) {
    if_has(j, path, key, [&](const json& v, const std::string& p) {
      check_keys(v, p, {"mean", "sd"});
      if_has(v, p, "mean", [&](const json& x, const std::string& q) { cost.mean_kgas = as_double(x, q); });
      if_has(v, p, "sd", [&](const json& x, const std::string& q) { cost.sd_kgas = as_double(x, q); });
      if (!(cost.mean_kgas > 0.0)) throw ConfigError(at(p, "mean"), "must be positive");
    });
  };
  one("claim", gas.claim);
  one("contest", gas.contest);
  one("finalize", gas.finalize);
  one("veto", gas.veto);
  one("finalize_veto", gas.finalize_veto);
}

template <class T, class F>
std::vector<T> read_list(const json& j, const std::string& path, F&& one) {
  std::vector<T> out;
  const auto& arr = as_array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(one(arr[i], at(path, i)));
  return out;
}

void read_experiments(const json& j, const std::string& path, ExperimentSettings& ex) {
  check_keys(j, path, {"validity", "n_values", "runs", "seeds", "cost_grid", "round_observer_cost"});
  if_has(j, path, "validity", [&](const json& v, const std::string& p) {
    ex.validity_points = read_list<Seconds>(v, p, [](const json& x, const std::string& q) {
      auto s = as_i64(x, q);
      if (s <= 0) throw ConfigError(q, "must be positive");
      return s;
    });
  });
  if_has(j, path, "n_values", [&](const json& v, const std::string& p) {
    ex.n_values = read_list<std::size_t>(v, p, [](const json& x, const std::string& q) {
      auto n = as_u64(x, q);
      if (n < 1) throw ConfigError(q, "must be at least 1");
      return static_cast<std::size_t>(n);
    });
  });
  if_has(j, path, "runs", [&](const json& v, const std::string& p) {
    ex.runs = as_u64(v, p);
    if (ex.runs < 1) throw ConfigError(p, "must be at least 1");
  });
  if_has(j, path, "seeds", [&](const json& v, const std::string& p) {
    ex.seeds = read_list<std::uint64_t>(v, p, as_u64);
  });
  if_has(j, path, "cost_grid", [&](const json& v, const std::string& p) {
    check_keys(v, p, {"m", "n"});
    auto sizes = [](const json& x, const std::string& q) { return static_cast<std::size_t>(as_u64(x, q)); };
    if_has(v, p, "m", [&](const json& x, const std::string& q) { ex.cost_m = read_list<std::size_t>(x, q, sizes); });
    if_has(v, p, "n", [&](const json& x, const std::string& q) { ex.cost_n = read_list<std::size_t>(x, q, sizes); });
  });
  if_has(j, path, "round_observer_cost",
         [&](const json& v, const std::string& p) { ex.round_observer_cost = as_bool(v, p); });
}

ProjectConfig read_project(const json& root) {
  check_keys(root, "",
             {"description", "chains", "reward", "validity_length", "duration", "seed", "wallets", "clients",
              "observers", "transfers", "double_spends", "gas", "price", "experiments", "resync_corrupted",
              "record_blocks"});
  ProjectConfig cfg = default_config();
  auto& eco = cfg.ecosystem;

  if_has(root, "", "description", [](const json& v, const std::string& p) { as_string(v, p); });
  if_has(root, "", "chains", [&](const json& v, const std::string& p) { read_chains(v, p, eco); });
  if_has(root, "", "reward", [&](const json& v, const std::string& p) { eco.reward = as_u64(v, p); });
  if_has(root, "", "validity_length",
         [&](const json& v, const std::string& p) { eco.validity_length = as_i64(v, p); });
  if_has(root, "", "duration", [&](const json& v, const std::string& p) { eco.duration = as_i64(v, p); });
  if_has(root, "", "seed", [&](const json& v, const std::string& p) { eco.seed = as_u64(v, p); });
  if_has(root, "", "resync_corrupted",
         [&](const json& v, const std::string& p) { eco.resync_corrupted = as_bool(v, p); });
  if_has(root, "", "record_blocks", [&](const json& v, const std::string& p) { eco.record_blocks = as_bool(v, p); });

  if_has(root, "", "wallets", [&](const json& v, const std::string& p) {
    eco.wallets = read_list<WalletSpec>(v, p, [](const json& w, const std::string& q) {
      check_keys(w, q, {"name", "balance", "key_label"});
      if (!w.contains("name")) throw ConfigError(at(q, "name"), "required");
      WalletSpec spec;
      spec.name = as_string(w["name"], at(q, "name"));
      if_has(w, q, "balance", [&](const json& x, const std::string& r) { spec.balance = as_u64(x, r); });
      if_has(w, q, "key_label", [&](const json& x, const std::string& r) { spec.key_label = as_string(x, r); });
      return spec;
    });
  });

  if_has(root, "", "clients", [&](const json& v, const std::string& p) {
    check_keys(v, p, {"count", "initial_balance", "think_time"});
    if_has(v, p, "count", [&](const json& x, const std::string& q) { eco.client_count = as_u64(x, q); });
    if_has(v, p, "initial_balance",
           [&](const json& x, const std::string& q) { eco.client_balance = as_u64(x, q); });
    if_has(v, p, "think_time", [&](const json& x, const std::string& q) {
      auto [lo, hi] = read_range(x, q);
      if (lo % 1000 || hi % 1000) throw ConfigError(q, "think time bounds must be whole seconds");
      eco.workload.think_min = lo / 1000;
      eco.workload.think_max = hi / 1000;
    });
  });

  if_has(root, "", "observers", [&](const json& v, const std::string& p) {
    check_keys(v, p, {"count", "wallets", "delay", "contest_rule", "watchdog"});
    auto& pol = eco.observer_policy;
    if_has(v, p, "count", [&](const json& x, const std::string& q) { eco.observer_count = as_u64(x, q); });
    if_has(v, p, "wallets", [&](const json& x, const std::string& q) {
      eco.observer_wallets = read_list<std::string>(x, q, as_string);
    });
    if_has(v, p, "delay", [&](const json& x, const std::string& q) {
      auto [lo, hi] = read_range(x, q);
      pol.observation_delay = {lo, hi};
    });
    if_has(v, p, "contest_rule", [&](const json& x, const std::string& q) {
      auto rule = as_string(x, q);
      if (rule == "winnable") {
        pol.contest_rule = ContestRule::winnable;
      } else if (rule == "always") {
        pol.contest_rule = ContestRule::always;
      } else {
        throw ConfigError(q, "expected \"winnable\" or \"always\"");
      }
    });
    if_has(v, p, "watchdog", [&](const json& x, const std::string& q) { pol.watchdog = as_bool(x, q); });
  });

  if_has(root, "", "transfers", [&](const json& v, const std::string& p) {
    eco.transfers = read_list<ScriptedTransfer>(v, p, read_transfer);
  });
  if_has(root, "", "double_spends", [&](const json& v, const std::string& p) {
    eco.double_spends = read_list<DoubleSpendScript>(v, p, read_double_spend);
  });
  if_has(root, "", "gas", [&](const json& v, const std::string& p) { read_gas(v, p, cfg.gas); });
  if_has(root, "", "price", [&](const json& v, const std::string& p) {
    check_keys(v, p, {"gas_price_gwei", "ether_usd"});
    if_has(v, p, "gas_price_gwei", [&](const json& x, const std::string& q) {
      cfg.price.gas_price_gwei = as_double(x, q);
      if (cfg.price.gas_price_gwei < 0) throw ConfigError(q, "must be non-negative");
    });
    if_has(v, p, "ether_usd", [&](const json& x, const std::string& q) {
      cfg.price.ether_usd = as_double(x, q);
      if (cfg.price.ether_usd < 0) throw ConfigError(q, "must be non-negative");
    });
  });
  if_has(root, "", "experiments", [&](const json& v, const std::string& p) { read_experiments(v, p, cfg.experiments); });

  eco.workload.validity_length = eco.validity_length;
  eco.workload.reward = eco.reward;
  validate(eco);
  return cfg;
}

// Best-effort line of a dotted path: follow each key's first quoted
// occurrence after the previous one.
std::size_t approximate_line(std::string_view text, const std::string& path) {
  std::size_t pos = 0;
  std::size_t found = std::string_view::npos;
  std::string key;
  auto step = [&] {
    if (key.empty()) return;
    auto p = text.find("\"" + key + "\"", pos);
    if (p != std::string_view::npos) pos = found = p;
    key.clear();
  };
  bool in_index = false;
  for (char ch : path) {
    if (ch == '[') {
      step();
      in_index = true;
    } else if (ch == ']') {
      in_index = false;
    } else if (ch == '.') {
      step();
    } else if (!in_index) {
      key += ch;
    }
  }
  step();
  if (found == std::string_view::npos) return 1;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(found), '\n'));
}

}  // namespace

ProjectConfig default_config() {
  ProjectConfig cfg;
  cfg.ecosystem.chains = uniform_chains(3);
  return cfg;
}

ProjectConfig parse_config(std::string_view text, const std::string& source) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
    throw ConfigParseError(source, line, column, what);
  }
  try {
    return read_project(root);
  } catch (const ConfigError& e) {
    throw ConfigParseError(source, approximate_line(text, e.path()), 0, e.what());
  }
}

ProjectConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::vector<Seconds> validity_points(const ExperimentSettings& settings) {
  if (!settings.validity_points.empty()) return settings.validity_points;
  std::vector<Seconds> out;
  for (Seconds v = 10; v <= 70; v += 5) out.push_back(v);
  return out;
}

std::vector<std::uint64_t> seeds_or_default(const ExperimentSettings& settings) {
  if (!settings.seeds.empty()) return settings.seeds;
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = 1; s <= 10; ++s) out.push_back(s);
  return out;
}

}  // namespace dextt
