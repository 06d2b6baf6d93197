// Acceptance checks, one output line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dextt/campaign.hpp"
#include "dextt/config.hpp"
#include "dextt/costmodel.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace dextt;

namespace {

const std::string kRoot = DEXTT_SOURCE_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v, int digits = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

Verdict worked_example() {
  const auto start = std::chrono::steady_clock::now();
  auto cfg = load_config(kRoot + "/configs/worked_example.json");
  auto report = run(cfg.ecosystem);
  const double elapsed = seconds_since(start);

  auto chains = nlohmann::json::array();
  for (const auto& s : report.final_states) chains.push_back(snapshot(s, report.name_lookup(), false));
  std::ifstream golden_file(kRoot + "/configs/golden/worked_example_snapshot.json");
  auto golden = nlohmann::json::parse(golden_file);

  bool balances = true;
  for (const auto& c : chains) {
    balances = balances && c["balances"]["W_s"] == 60 && c["balances"]["W_d"] == 19 && c["balances"]["W_w"] == 1;
  }
  const bool equal = nlohmann::json{{"chains", chains}} == golden;
  return {balances && equal && elapsed < 1.0,
          "W_s/W_d/W_w = 60/19/1 on 3 chains: " + std::string(balances ? "yes" : "no") +
              ", golden snapshot " + (equal ? "equal" : "DIFFERS") + ", " + fmt(elapsed, 3) + " s"};
}

Verdict validity_sweep() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Seconds> points;
  for (Seconds v = 10; v <= 70; v += 5) points.push_back(v);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
  auto summary = sweep_validity(sweep_base_config(), points, seeds, Execution::parallel);
  auto check = check_sweep(summary, 52, 13);
  const double elapsed = seconds_since(start);

  std::ostringstream curve;
  for (std::size_t i = 0; i < points.size(); ++i) curve << (i ? " " : "") << points[i] << ":" << fmt(summary.mean_corrupted[i], 1);
  return {check.ok() && elapsed < 120.0,
          std::string("zero from 52 s: ") + (check.zero_at_or_above ? "yes" : "no") +
              ", corrupted at <=13 s: " + (check.some_at_or_below ? "yes" : "no") +
              ", smoothed non-increasing: " + (check.non_increasing ? "yes" : "no") + ", " + fmt(elapsed, 1) +
              " s; mean corrupted " + curve.str()};
}

Verdict contest_scaling_check() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t n : {4, 16, 64}) {
    auto row = contest_scaling(n, 200, 1, Execution::parallel);
    ok = ok && row.matches_harmonic() && row.within_log2_bound();
    detail << "n=" << n << " mean " << fmt(row.mean, 3) << "+-" << fmt(row.standard_error, 3) << " (H " << fmt(row.harmonic, 3)
           << ", log2 " << fmt(row.log2n, 1) << (row.matches_harmonic() ? "" : ", off H_n")
           << (row.within_log2_bound() ? "" : ", above log2 bound") << "); ";
  }
  const double elapsed = seconds_since(start);
  detail << fmt(elapsed, 1) << " s";
  return {ok && elapsed < 60.0, detail.str()};
}

Verdict costs() {
  auto c = transfer_cost(10, 10);
  const bool ok = std::abs(c.receiver_usd - 0.59) <= 0.005 && std::abs(c.observer_usd - 0.94) <= 0.005;
  return {ok, "receiver " + fmt(c.receiver_kgas, 1) + " kGas = " + fmt(c.receiver_usd, 4) + " USD, observer " +
                  fmt(c.observer_kgas, 1) + " kGas = " + fmt(c.observer_usd, 4) + " USD"};
}

Verdict thresholds() {
  const std::map<std::size_t, double> expected{{10, 2.83}, {100, 14.15}, {1000, 94.32}};
  bool ok = true;
  std::ostringstream detail;
  for (auto [n, want] : expected) {
    const double got = min_viable_price(n, 10, 1, {}, {}, true);
    ok = ok && std::abs(got - want) <= 0.01;
    detail << "n=" << n << ": " << fmt(got, 3) << " (want " << fmt(want, 2) << ") ";
  }
  return {ok, detail.str()};
}

Verdict double_spends() {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t scenarios = 50;
  auto checks = map_points<VetoCheck>(
      scenarios,
      [](std::size_t i) {
        auto cfg = random_double_spend_config(1000 + i);
        return check_double_spends(cfg, run(cfg));
      },
      Execution::parallel);
  const double elapsed = seconds_since(start);
  std::size_t failed = 0;
  std::string first_problem;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (checks[i].ok()) continue;
    ++failed;
    if (first_problem.empty() && !checks[i].problems.empty()) {
      first_problem = "; scenario " + std::to_string(1000 + i) + ": " + checks[i].problems.front();
    }
  }
  return {failed == 0 && elapsed < 30.0, std::to_string(scenarios - failed) + "/" + std::to_string(scenarios) +
                                             " scenarios hold all four properties, " + fmt(elapsed, 1) + " s" +
                                             first_problem};
}

std::map<std::string, std::string> hash_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream f(entry.path(), std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    auto d = sha256(content);
    out[fs::relative(entry.path(), root).string()] = to_hex(d);
  }
  return out;
}

Verdict determinism() {
  const fs::path work = fs::current_path() / "acceptance-determinism";
  fs::remove_all(work);
  fs::create_directories(work);
  const auto small_sweep = work / "sweep.json";
  std::ofstream(small_sweep) << R"({"duration": 300, "clients": {"count": 10, "initial_balance": 1000},
    "observers": {"count": 10}, "experiments": {"validity": [13, 52], "seeds": [1, 2]}})";

  const std::string cli = DEXTT_CLI;
  const std::vector<std::string> invocations{
      "--campaign run --config " + kRoot + "/configs/worked_example.json",
      "--campaign run --config " + kRoot + "/configs/ecosystem.json --seeds 1-2",
      "--campaign sweep-validity --config " + small_sweep.string(),
      "--campaign contest-scaling --reps 30 --seeds 5",
      "--campaign cost-report",
      "--campaign incentive",
      "--campaign veto-demo --seeds 1-3",
  };
  auto run_all = [&](const std::string& dir, const std::string& extra) {
    bool ok = true;
    for (std::size_t i = 0; i < invocations.size(); ++i) {
      const auto out = work / dir / std::to_string(i);
      const auto cmd = cli + " " + invocations[i] + " --out " + out.string() + extra + " > /dev/null";
      ok = ok && std::system(cmd.c_str()) == 0;
    }
    return ok;
  };
  const bool ran = run_all("a", "") && run_all("b", "") && run_all("serial", " --serial");
  if (!ran) return {false, "a CLI invocation exited nonzero"};
  auto a = hash_tree(work / "a");
  auto b = hash_tree(work / "b");
  auto s = hash_tree(work / "serial");
  const bool ok = !a.empty() && a == b && a == s;
  return {ok, std::to_string(a.size()) + " report files across 6 campaigns; rerun hashes " +
                  (a == b ? "identical" : "DIFFER") + ", serial vs parallel " + (a == s ? "identical" : "DIFFER")};
}

Verdict order_independence() {
  std::size_t sets_ok = 0;
  std::size_t txs = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto set = testing::random_transaction_set(seed);
    txs += set.open_phase.size() + set.close_phase.size();
    std::mt19937_64 r1(seed * 7919), r2(seed * 104729);
    std::vector<std::string> errors;
    auto x = testing::apply_shuffled(set, r1, &errors);
    auto y = testing::apply_shuffled(set, r2, &errors);
    if (errors.empty() && x.balances == y.balances && testing::same_outcome(x, y)) ++sets_ok;
  }
  std::size_t vetoes_ok = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto [x, y] = testing::veto_in_both_orders(seed);
    if (testing::same_outcome(x, y) && x.veto_records.size() == 1) ++vetoes_ok;
  }
  return {sets_ok == 100 && vetoes_ok == 100,
          std::to_string(sets_ok) + "/100 transaction sets (" + std::to_string(txs) + " txs) and " +
              std::to_string(vetoes_ok) + "/100 swapped-discovery veto scenarios agree"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"worked-example golden state", worked_example},
      {"validity threshold sweep", validity_sweep},
      {"contest scaling vs H_n and log2 n", contest_scaling_check},
      {"cost reproduction (m = 10)", costs},
      {"incentive thresholds", thresholds},
      {"double-spend property suite", double_spends},
      {"determinism of campaign outputs", determinism},
      {"order independence", order_independence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  [" << i + 1 << "] " << criteria[i].first << ": " << v.detail
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed;
}
