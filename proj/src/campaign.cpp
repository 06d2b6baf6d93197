#include "dextt/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>

#ifdef DEXTT_HAVE_OPENMP
#include <omp.h>
#endif

namespace dextt {

void for_each_point(std::size_t count, const std::function<void(std::size_t)>& body, Execution exec) {
  std::vector<std::exception_ptr> errors(count);
  auto guarded = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (exec == Execution::parallel) {
    const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) guarded(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < count; ++i) guarded(i);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---- validity sweep ----------------------------------------------------------

EcosystemConfig sweep_base_config() {
  EcosystemConfig c;
  c.chains = uniform_chains(3);
  c.client_count = 10;
  c.client_balance = 1000;
  c.observer_count = 10;
  c.duration = 1800;
  return c;
}

SweepSummary sweep_validity(const EcosystemConfig& base, std::span<const Seconds> validity,
                            std::span<const std::uint64_t> seeds, Execution exec) {
  SweepSummary s;
  s.points.assign(validity.begin(), validity.end());
  const std::size_t total = validity.size() * seeds.size();
  s.rows = map_points<SweepRow>(
      total,
      [&](std::size_t i) {
        auto cfg = base;
        cfg.validity_length = validity[i / seeds.size()];
        cfg.workload.validity_length = cfg.validity_length;
        cfg.seed = seeds[i % seeds.size()];
        auto report = run(cfg);
        return SweepRow{cfg.validity_length, cfg.seed, report.transfers.size(), count_corrupted(report),
                        mean_contests_per_chain(report)};
      },
      exec);
  for (std::size_t p = 0; p < validity.size(); ++p) {
    double sum = 0.0;
    for (std::size_t k = 0; k < seeds.size(); ++k) sum += static_cast<double>(s.rows[p * seeds.size() + k].corrupted);
    s.mean_corrupted.push_back(seeds.empty() ? 0.0 : sum / static_cast<double>(seeds.size()));
  }
  return s;
}

SweepCheck check_sweep(const SweepSummary& summary, Seconds safe_from, Seconds unsafe_upto) {
  SweepCheck c;
  c.zero_at_or_above = true;
  for (const auto& r : summary.rows) {
    if (r.validity >= safe_from && r.corrupted != 0) c.zero_at_or_above = false;
    if (r.validity <= unsafe_upto && r.corrupted > 0) c.some_at_or_below = true;
  }
  const auto& m = summary.mean_corrupted;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(m.size() - 1, i + 1);
    double sum = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) sum += m[k];
    c.smoothed.push_back(sum / static_cast<double>(hi - lo + 1));
  }
  c.non_increasing = true;
  for (std::size_t i = 1; i < c.smoothed.size(); ++i) {
    if (c.smoothed[i] > c.smoothed[i - 1] + 1e-9) c.non_increasing = false;
  }
  return c;
}

std::string sweep_csv(const SweepSummary& summary) {
  std::ostringstream out;
  out << "validity,seed,transfers,corrupted,mean_contests_per_chain\n";
  for (const auto& r : summary.rows) {
    out << r.validity << ',' << r.seed << ',' << r.transfers << ',' << r.corrupted << ',' << r.mean_contests << '\n';
  }
  return out.str();
}

std::string sweep_seed_csv(const SweepSummary& summary, std::uint64_t seed) {
  std::ostringstream out;
  out << "validity,corrupted,transfers\n";
  for (const auto& r : summary.rows) {
    if (r.seed == seed) out << r.validity << ',' << r.corrupted << ',' << r.transfers << '\n';
  }
  return out.str();
}

// ---- contest scaling -----------------------------------------------------------

double harmonic(std::size_t n) {
  double h = 0.0;
  for (std::size_t k = 1; k <= n; ++k) h += 1.0 / static_cast<double>(k);
  return h;
}

EcosystemConfig single_transfer_config(std::size_t n, std::uint64_t seed) {
  EcosystemConfig c;
  c.chains = uniform_chains(3);
  c.seed = seed;
  c.duration = 1;
  c.observer_count = n;
  c.observer_policy.watchdog = false;
  c.wallets = {{"sender", 100, ""}, {"recipient", 0, ""}};
  ScriptedTransfer t;
  t.sender = "sender";
  t.recipient = "recipient";
  t.amount = 20;
  t.claim_chain = 0;
  t.submit_at = 0;
  c.transfers.push_back(t);
  return c;
}

bool ScalingRow::matches_harmonic() const { return std::abs(mean - harmonic) <= 3.0 * standard_error; }
bool ScalingRow::within_log2_bound() const { return mean <= log2n + 3.0 * standard_error; }

ScalingRow contest_scaling(std::size_t n, std::size_t runs, std::uint64_t first_seed, Execution exec) {
  ScalingRow row;
  row.n = n;
  row.runs = runs;
  row.harmonic = harmonic(n);
  row.log2n = std::log2(static_cast<double>(n));
  row.samples = map_points<double>(
      runs, [&](std::size_t i) { return mean_contests_per_chain(run(single_transfer_config(n, first_seed + i))); },
      exec);
  double sum = 0.0;
  for (double x : row.samples) sum += x;
  row.mean = runs ? sum / static_cast<double>(runs) : 0.0;
  double ss = 0.0;
  for (double x : row.samples) ss += (x - row.mean) * (x - row.mean);
  if (runs > 1) row.standard_error = std::sqrt(ss / static_cast<double>(runs - 1) / static_cast<double>(runs));
  return row;
}

std::string scaling_csv(std::span<const ScalingRow> rows) {
  std::ostringstream out;
  out << "n,runs,mean_contests_per_chain,standard_error,harmonic,log2n\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.runs << ',' << r.mean << ',' << r.standard_error << ',' << r.harmonic << ',' << r.log2n
        << '\n';
  }
  return out.str();
}

// ---- double spends -----------------------------------------------------------

EcosystemConfig veto_demo_config(std::uint64_t seed) {
  EcosystemConfig c;
  c.chains = uniform_chains(3);
  c.seed = seed;
  c.duration = 1;
  c.observer_count = 3;
  c.wallets = {{"adversary", 10, ""}, {"recipient-a", 0, ""}, {"recipient-b", 0, ""}};
  DoubleSpendScript d;
  d.sender = "adversary";
  d.recipients = {"recipient-a", "recipient-b"};
  d.amounts = {8, 8};
  d.t0 = {1, 30};
  d.t1 = {61, 90};
  d.claim_chains = {0, 1};
  d.submit_at = {0, 30'000};
  c.double_spends.push_back(d);
  c.duration = 31;
  return c;
}

EcosystemConfig random_double_spend_config(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5eedd0b1e5ULL);
  auto pick = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };

  EcosystemConfig c;
  const auto m = static_cast<std::size_t>(pick(2, 5));
  c.chains = uniform_chains(m);
  c.seed = seed;
  c.duration = 1;
  c.observer_count = static_cast<std::size_t>(pick(1, 8));
  const auto balance = static_cast<Amount>(pick(4, 200));
  c.wallets = {{"adversary", balance, ""}, {"recipient-a", 0, ""}, {"recipient-b", 0, ""}};

  DoubleSpendScript d;
  d.sender = "adversary";
  d.recipients = {"recipient-a", "recipient-b"};
  for (std::size_t k = 0; k < 2; ++k) {
    d.amounts[k] = static_cast<Amount>(pick(2, static_cast<std::int64_t>(balance)));
    d.claim_chains[k] = static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(m) - 1));
  }
  // Both legs are claimed while both windows are open.
  d.t0[0] = pick(0, 10);
  d.t1[0] = d.t0[0] + pick(52, 90);
  d.t0[1] = pick(d.t0[0], d.t0[0] + 20);
  d.t1[1] = d.t0[1] + pick(52, 90);
  d.submit_at[0] = pick(0, 5'000);
  d.submit_at[1] = std::max<Millis>(to_millis(d.t0[1]), d.submit_at[0]) + pick(0, 15'000);
  c.double_spends.push_back(d);
  c.duration = ceil_seconds(d.submit_at[1]) + 1;
  return c;
}

VetoCheck check_double_spends(const EcosystemConfig& config, const RunReport& report) {
  VetoCheck c;
  auto key_of = [&](const std::string& name) {
    for (const auto& [key, n] : report.names) {
      if (n == name) return key;
    }
    throw std::invalid_argument("unknown wallet " + name);
  };
  for (const auto& d : config.double_spends) {
    const auto sender = key_of(d.sender);
    std::vector<Signature> alphas;
    for (const auto& t : report.transfers) {
      if (t.double_spend && t.sender == d.sender) alphas.push_back(t.alpha);
    }
    std::optional<PublicKey> winner;
    for (const auto& s : report.final_states) {
      const auto chain = "chain " + std::to_string(s.chain_id);
      if (s.balance_of(sender) != 0) {
        c.sender_zeroed = false;
        c.problems.push_back(chain + ": sender balance " + std::to_string(s.balance_of(sender)));
      }
      for (const auto& a : alphas) {
        if (const auto* r = s.find_poi(a); r && r->status == PoiStatus::finalized) {
          c.none_finalized = false;
          c.problems.push_back(chain + ": conflicting transfer finalized");
        }
      }
      std::size_t paid = 0;
      for (const auto& [key, v] : s.veto_records) {
        if (v.status != VetoStatus::finalized || !v.winner) continue;
        ++paid;
        if (!winner) {
          winner = v.winner;
        } else if (*winner != *v.winner) {
          c.single_winner = false;
          c.problems.push_back(chain + ": veto winner differs");
        }
      }
      if (paid != 1) {
        c.single_winner = false;
        c.problems.push_back(chain + ": " + std::to_string(paid) + " veto payouts");
      }
    }
  }
  for (const auto& s : report.supply) {
    if (!s.conserved || s.adjustment != 0) {
      c.conserved = false;
      c.problems.push_back("supply not conserved");
    }
  }
  return c;
}

}  // namespace dextt
