#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dextt/ecosystem.hpp"

namespace dextt {

/// How independent campaign points are executed. Serial is the reference;
/// parallel must produce identical results.
enum class Execution { serial, parallel };

/// Calls body(i) for i in [0, count). Exceptions from any worker are
/// rethrown (lowest index first) after all workers finish.
void for_each_point(std::size_t count, const std::function<void(std::size_t)>& body, Execution exec);

template <class R, class F>
std::vector<R> map_points(std::size_t count, F&& f, Execution exec) {
  std::vector<R> out(count);
  for_each_point(count, [&](std::size_t i) { out[i] = f(i); }, exec);
  return out;
}

// ---- validity sweep ----------------------------------------------------------

struct SweepRow {
  Seconds validity = 0;
  std::uint64_t seed = 0;
  std::size_t transfers = 0;
  std::size_t corrupted = 0;
  double mean_contests = 0.0;
};

struct SweepSummary {
  std::vector<SweepRow> rows;  // validity-major, then seed
  std::vector<Seconds> points;
  std::vector<double> mean_corrupted;  // per point, over seeds
};

/// 3 chains at 13 s, 10 clients, 10 observers, 30 simulated minutes.
EcosystemConfig sweep_base_config();

SweepSummary sweep_validity(const EcosystemConfig& base, std::span<const Seconds> validity,
                            std::span<const std::uint64_t> seeds, Execution exec = Execution::parallel);

struct SweepCheck {
  bool zero_at_or_above = false;
  bool some_at_or_below = false;
  bool non_increasing = false;
  std::vector<double> smoothed;  // 3-point moving average of mean_corrupted
  bool ok() const { return zero_at_or_above && some_at_or_below && non_increasing; }
};

SweepCheck check_sweep(const SweepSummary& summary, Seconds safe_from = 52, Seconds unsafe_upto = 13);

std::string sweep_csv(const SweepSummary& summary);
std::string sweep_seed_csv(const SweepSummary& summary, std::uint64_t seed);

// ---- contest scaling -----------------------------------------------------------

/// H_n = 1 + 1/2 + ... + 1/n, the expected number of left-to-right minima in
/// a random order of n distinct values.
double harmonic(std::size_t n);

/// One scripted transfer observed by n generated observers.
EcosystemConfig single_transfer_config(std::size_t n, std::uint64_t seed);

struct ScalingRow {
  std::size_t n = 0;
  std::size_t runs = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double harmonic = 0.0;
  double log2n = 0.0;
  std::vector<double> samples;

  bool matches_harmonic() const;   // |mean - H_n| <= 3 SE
  bool within_log2_bound() const;  // mean <= log2 n + 3 SE
};

/// Seeds are first_seed, first_seed + 1, ...
ScalingRow contest_scaling(std::size_t n, std::size_t runs, std::uint64_t first_seed = 1,
                           Execution exec = Execution::parallel);

std::string scaling_csv(std::span<const ScalingRow> rows);

// ---- double spends -----------------------------------------------------------

/// Adversary with 10 PBT signs two 8-PBT PoIs to different recipients,
/// claimed on different chains.
EcosystemConfig veto_demo_config(std::uint64_t seed);

/// Randomized adversary scenario: balance, amounts, overlapping windows,
/// claim chains, submit times and observer count drawn from `seed`.
EcosystemConfig random_double_spend_config(std::uint64_t seed);

struct VetoCheck {
  bool sender_zeroed = true;
  bool none_finalized = true;
  bool single_winner = true;
  bool conserved = true;
  std::vector<std::string> problems;
  bool ok() const { return sender_zeroed && none_finalized && single_winner && conserved; }
};

/// Checks every double-spend script of `config` against the run's final states.
VetoCheck check_double_spends(const EcosystemConfig& config, const RunReport& report);

}  // namespace dextt
