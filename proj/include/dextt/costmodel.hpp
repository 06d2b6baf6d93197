#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "dextt/protocol.hpp"

namespace dextt {

struct RunReport;

struct GasCost {
  double mean_kgas = 0.0;
  double sd_kgas = 0.0;  // carried into reports, not modeled
};

struct GasTable {
  GasCost claim{57.7, 11.1};
  GasCost contest{81.5, 64.2};
  GasCost finalize{45.5, 0.1};
  GasCost veto{131.3, 91.9};
  GasCost finalize_veto{48.6, 1.7};

  const GasCost& of(TxKind kind) const;
};

/// Throws std::invalid_argument unless every mean is positive.
void validate(const GasTable& gas);

struct PriceModel {
  double gas_price_gwei = 10.0;
  double ether_usd = 115.71;

  double usd(double kgas) const { return kgas * 1e3 * gas_price_gwei * 1e-9 * ether_usd; }
};

/// Throws std::invalid_argument for negative prices.
void validate(const PriceModel& price);

struct CostBreakdown {
  std::size_t m = 0;
  std::size_t n = 0;
  double receiver_kgas = 0.0;
  double observer_kgas = 0.0;  // per posting observer
  double expected_posting_observers = 0.0;
  double sender_kgas = 0.0;
  double receiver_usd = 0.0;
  double observer_usd = 0.0;
  double sender_usd = 0.0;
  // receiver plus every expected posting observer
  double total_usd = 0.0;
};

/// Analytical per-transfer cost: one CLAIM and m FINALIZEs for the receiver,
/// m CONTESTs per posting observer, log2(n) posting observers.
CostBreakdown transfer_cost(std::size_t m, std::size_t n, const GasTable& gas = {},
                            const PriceModel& price = {});

/// Reward paid to the winning witness as a function of the transferred amount.
using RewardFunction = std::function<Amount(Amount transfer_amount)>;
RewardFunction constant_reward(Amount reward = kDefaultReward);

/// PBT price above which a posting observer breaks even:
/// observer_usd * n / (log2(n) * reward). With `round_observer_cost` the
/// observer cost is rounded to whole cents first. Throws for n < 2 or reward 0.
double min_viable_price(std::size_t n, std::size_t m, Amount reward, const GasTable& gas = {},
                        const PriceModel& price = {}, bool round_observer_cost = true);

struct SimulatedCost {
  std::size_t transfers = 0;
  std::uint64_t claims = 0;
  std::uint64_t finalizes = 0;
  std::uint64_t contests = 0;
  std::uint64_t vetoes = 0;
  std::uint64_t finalize_vetoes = 0;
  double receiver_kgas = 0.0;
  double observer_kgas = 0.0;  // contests, vetoes and finalize-vetoes
  double receiver_usd = 0.0;
  double observer_usd = 0.0;
  double observer_kgas_per_transfer = 0.0;
};

/// Costs from the transactions actually included in a run's blocks.
SimulatedCost simulated_cost_report(const RunReport& report, const GasTable& gas = {},
                                    const PriceModel& price = {});

nlohmann::json to_json(const CostBreakdown& cost);
nlohmann::json to_json(const SimulatedCost& cost);
nlohmann::json to_json(const GasTable& gas);
std::string cost_table(const CostBreakdown& cost);

}  // namespace dextt
