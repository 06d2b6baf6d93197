#include "dextt/costmodel.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "dextt/ecosystem.hpp"

namespace dextt {

const GasCost& GasTable::of(TxKind kind) const {
  switch (kind) {
    case TxKind::claim: return claim;
    case TxKind::contest: return contest;
    case TxKind::finalize: return finalize;
    case TxKind::veto: return veto;
    case TxKind::finalize_veto: return finalize_veto;
  }
  throw std::invalid_argument("unknown transaction kind");
}

void validate(const GasTable& gas) {
  for (auto k : {TxKind::claim, TxKind::contest, TxKind::finalize, TxKind::veto, TxKind::finalize_veto}) {
    if (!(gas.of(k).mean_kgas > 0.0)) {
      throw std::invalid_argument(std::string("gas mean for ") + std::string(to_string(k)) + " must be positive");
    }
  }
}

void validate(const PriceModel& price) {
  if (price.gas_price_gwei < 0.0) throw std::invalid_argument("gas_price must be non-negative");
  if (price.ether_usd < 0.0) throw std::invalid_argument("ether_usd must be non-negative");
}

CostBreakdown transfer_cost(std::size_t m, std::size_t n, const GasTable& gas, const PriceModel& price) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  CostBreakdown c;
  c.m = m;
  c.n = n;
  const auto md = static_cast<double>(m);
  c.receiver_kgas = gas.claim.mean_kgas + md * gas.finalize.mean_kgas;
  c.observer_kgas = md * gas.contest.mean_kgas;
  c.expected_posting_observers = n == 1 ? 1.0 : std::log2(static_cast<double>(n));
  c.receiver_usd = price.usd(c.receiver_kgas);
  c.observer_usd = price.usd(c.observer_kgas);
  c.sender_usd = price.usd(c.sender_kgas);
  c.total_usd = c.receiver_usd + c.expected_posting_observers * c.observer_usd;
  return c;
}

RewardFunction constant_reward(Amount reward) {
  return [reward](Amount) { return reward; };
}

double min_viable_price(std::size_t n, std::size_t m, Amount reward, const GasTable& gas,
                        const PriceModel& price, bool round_observer_cost) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (reward == 0) throw std::invalid_argument("reward must be positive");
  double cost = transfer_cost(m, n, gas, price).observer_usd;
  if (round_observer_cost) cost = std::round(cost * 100.0) / 100.0;
  const auto nd = static_cast<double>(n);
  return cost * nd / (std::log2(nd) * static_cast<double>(reward));
}

SimulatedCost simulated_cost_report(const RunReport& report, const GasTable& gas, const PriceModel& price) {
  SimulatedCost s;
  s.transfers = report.transfers.size();
  s.claims = report.tally.included_of(TxKind::claim);
  s.finalizes = report.tally.included_of(TxKind::finalize);
  s.contests = report.tally.included_of(TxKind::contest);
  s.vetoes = report.tally.included_of(TxKind::veto);
  s.finalize_vetoes = report.tally.included_of(TxKind::finalize_veto);
  auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  s.receiver_kgas = d(s.claims) * gas.claim.mean_kgas + d(s.finalizes) * gas.finalize.mean_kgas;
  s.observer_kgas = d(s.contests) * gas.contest.mean_kgas + d(s.vetoes) * gas.veto.mean_kgas +
                    d(s.finalize_vetoes) * gas.finalize_veto.mean_kgas;
  s.receiver_usd = price.usd(s.receiver_kgas);
  s.observer_usd = price.usd(s.observer_kgas);
  if (s.transfers > 0) s.observer_kgas_per_transfer = s.observer_kgas / static_cast<double>(s.transfers);
  return s;
}

nlohmann::json to_json(const CostBreakdown& c) {
  return {{"m", c.m},
          {"n", c.n},
          {"receiver_kgas", c.receiver_kgas},
          {"observer_kgas", c.observer_kgas},
          {"sender_kgas", c.sender_kgas},
          {"expected_posting_observers", c.expected_posting_observers},
          {"receiver_usd", c.receiver_usd},
          {"observer_usd", c.observer_usd},
          {"sender_usd", c.sender_usd},
          {"total_usd", c.total_usd}};
}

nlohmann::json to_json(const SimulatedCost& s) {
  return {{"transfers", s.transfers},
          {"claims", s.claims},
          {"finalizes", s.finalizes},
          {"contests", s.contests},
          {"vetoes", s.vetoes},
          {"finalize_vetoes", s.finalize_vetoes},
          {"receiver_kgas", s.receiver_kgas},
          {"observer_kgas", s.observer_kgas},
          {"receiver_usd", s.receiver_usd},
          {"observer_usd", s.observer_usd},
          {"observer_kgas_per_transfer", s.observer_kgas_per_transfer}};
}

nlohmann::json to_json(const GasTable& gas) {
  nlohmann::json j;
  for (auto k : {TxKind::claim, TxKind::contest, TxKind::finalize, TxKind::veto, TxKind::finalize_veto}) {
    j[std::string(to_string(k))] = {{"mean_kgas", gas.of(k).mean_kgas}, {"sd_kgas", gas.of(k).sd_kgas}};
  }
  return j;
}

std::string cost_table(const CostBreakdown& c) {
  std::ostringstream out;
  out << std::fixed;
  out << "role       kGas      USD\n";
  out << "sender     " << std::setw(7) << std::setprecision(1) << c.sender_kgas << "  " << std::setprecision(4)
      << c.sender_usd << '\n';
  out << "receiver   " << std::setw(7) << std::setprecision(1) << c.receiver_kgas << "  " << std::setprecision(4)
      << c.receiver_usd << '\n';
  out << "observer   " << std::setw(7) << std::setprecision(1) << c.observer_kgas << "  " << std::setprecision(4)
      << c.observer_usd << "  (x" << std::setprecision(2) << c.expected_posting_observers << " expected)\n";
  return out.str();
}

}  // namespace dextt
