// Command-line front end: single runs and the experiment campaigns.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "dextt/campaign.hpp"
#include "dextt/config.hpp"
#include "dextt/costmodel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dextt;

namespace {

struct Options {
  std::string campaign = "run";
  std::string config;
  std::string out = "out";
  std::string seeds;
  std::size_t reps = 0;
  std::optional<double> jitter;
  std::optional<bool> round_observer_cost;
  bool serial = false;
};

// "1,2,5-8" -> {1, 2, 5, 6, 7, 8}
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(std::stoull(item));
      continue;
    }
    auto lo = std::stoull(item.substr(0, dash));
    auto hi = std::stoull(item.substr(dash + 1));
    if (hi < lo) throw std::invalid_argument("empty seed range " + item);
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument("no seeds in '" + text + "'");
  return out;
}

class Output {
 public:
  Output(const fs::path& root, const std::string& campaign) : dir_(root / campaign), campaign_(campaign) {
    fs::create_directories(dir_);
  }

  fs::path path(const std::string& suffix, const std::string& ext) const {
    return dir_ / (campaign_ + "-" + suffix + "." + ext);
  }

  void write(const std::string& suffix, const std::string& ext, const std::string& content) const {
    std::ofstream f(path(suffix, ext), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path(suffix, ext).string());
    f << content;
  }

  void write_json(const std::string& suffix, const json& j) const { write(suffix, "json", j.dump(2) + "\n"); }

 private:
  fs::path dir_;
  std::string campaign_;
};

struct Context {
  Options opt;
  ProjectConfig cfg;
  bool have_config = false;
  std::vector<std::uint64_t> seeds;
  Execution exec = Execution::parallel;
  std::vector<std::string> failures;
};

void check_run(Context& ctx, const RunReport& report, const std::string& label) {
  for (const auto& s : report.supply) {
    if (!s.conserved) ctx.failures.push_back(label + ": supply not conserved");
  }
  for (const auto& inc : report.inconsistencies) {
    ctx.failures.push_back(label + ": inconsistent balance for " + inc.wallet);
  }
}

json snapshots(const RunReport& report) {
  auto chains = json::array();
  for (const auto& s : report.final_states) chains.push_back(snapshot(s, report.name_lookup(), false));
  return {{"chains", chains}};
}

void cmd_run(Context& ctx, const Output& out) {
  auto reports = map_points<RunReport>(
      ctx.seeds.size(),
      [&](std::size_t i) {
        auto eco = ctx.cfg.ecosystem;
        eco.seed = ctx.seeds[i];
        return run(eco);
      },
      ctx.exec);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto seed = std::to_string(ctx.seeds[i]);
    out.write_json(seed, to_json(reports[i]));
    out.write(seed, "csv", ledger_csv(reports[i]));
    out.write(seed + ".snapshot", "json", snapshots(reports[i]).dump(2) + "\n");
    check_run(ctx, reports[i], "seed " + seed);
    std::cout << "seed " << seed << ": " << reports[i].transfers.size() << " transfers, "
              << count_corrupted(reports[i]) << " corrupted\n";
  }
}

void cmd_sweep(Context& ctx, const Output& out) {
  auto base = ctx.have_config ? ctx.cfg.ecosystem : sweep_base_config();
  auto points = validity_points(ctx.cfg.experiments);
  auto summary = sweep_validity(base, points, ctx.seeds, ctx.exec);
  auto check = check_sweep(summary);
  for (auto seed : ctx.seeds) out.write(std::to_string(seed), "csv", sweep_seed_csv(summary, seed));
  out.write("summary", "csv", sweep_csv(summary));
  out.write_json("summary", {{"validity", summary.points},
                             {"mean_corrupted", summary.mean_corrupted},
                             {"smoothed", check.smoothed},
                             {"seeds", ctx.seeds},
                             {"zero_from_52s", check.zero_at_or_above},
                             {"some_at_13s_or_below", check.some_at_or_below},
                             {"non_increasing", check.non_increasing}});
  std::cout << "validity  mean_corrupted\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::cout << std::setw(8) << points[i] << "  " << summary.mean_corrupted[i] << '\n';
  }
}

void cmd_scaling(Context& ctx, const Output& out) {
  const std::size_t runs = ctx.opt.reps ? ctx.opt.reps : ctx.cfg.experiments.runs;
  const auto first = ctx.seeds.front();
  std::vector<ScalingRow> rows;
  for (auto n : ctx.cfg.experiments.n_values) rows.push_back(contest_scaling(n, runs, first, ctx.exec));
  out.write(std::to_string(first), "csv", scaling_csv(rows));
  auto j = json::array();
  for (const auto& r : rows) {
    j.push_back({{"n", r.n},
                 {"runs", r.runs},
                 {"mean", r.mean},
                 {"standard_error", r.standard_error},
                 {"harmonic", r.harmonic},
                 {"log2n", r.log2n},
                 {"matches_harmonic", r.matches_harmonic()},
                 {"within_log2_bound", r.within_log2_bound()}});
    std::cout << "n=" << r.n << " mean " << r.mean << " +- " << r.standard_error << "  H_n " << r.harmonic
              << "  log2n " << r.log2n << '\n';
  }
  out.write_json(std::to_string(first), {{"first_seed", first}, {"rows", j}});
}

json thresholds(const Context& ctx, std::size_t m) {
  const bool round = ctx.cfg.experiments.round_observer_cost;
  auto j = json::array();
  for (auto n : ctx.cfg.experiments.cost_n) {
    j.push_back({{"n", n},
                 {"m", m},
                 {"min_viable_price_usd",
                  min_viable_price(n, m, ctx.cfg.ecosystem.reward, ctx.cfg.gas, ctx.cfg.price, round)}});
  }
  return j;
}

void cmd_cost(Context& ctx, const Output& out) {
  json j;
  j["gas"] = to_json(ctx.cfg.gas);
  j["price"] = {{"gas_price_gwei", ctx.cfg.price.gas_price_gwei}, {"ether_usd", ctx.cfg.price.ether_usd}};
  j["round_observer_cost"] = ctx.cfg.experiments.round_observer_cost;
  auto grid = json::array();
  auto incentive = json::array();
  for (auto m : ctx.cfg.experiments.cost_m) {
    for (auto n : ctx.cfg.experiments.cost_n) {
      auto c = transfer_cost(m, n, ctx.cfg.gas, ctx.cfg.price);
      grid.push_back(to_json(c));
      std::cout << "m=" << m << " n=" << n << '\n' << cost_table(c);
    }
    for (auto& t : thresholds(ctx, m)) incentive.push_back(t);
  }
  j["transfer_cost"] = grid;
  j["min_viable_price"] = incentive;

  const auto& eco = ctx.cfg.ecosystem;
  if (ctx.have_config && (eco.client_count > 0 || !eco.transfers.empty() || !eco.double_spends.empty())) {
    auto runs = json::object();
    for (auto seed : ctx.seeds) {
      auto e = eco;
      e.seed = seed;
      auto report = run(e);
      check_run(ctx, report, "seed " + std::to_string(seed));
      runs[std::to_string(seed)] = to_json(simulated_cost_report(report, ctx.cfg.gas, ctx.cfg.price));
    }
    j["simulated"] = runs;
  }
  out.write_json(std::to_string(ctx.seeds.front()), j);
}

void cmd_incentive(Context& ctx, const Output& out) {
  auto j = json::array();
  std::ostringstream csv;
  csv << "m,n,min_viable_price_usd\n";
  for (auto m : ctx.cfg.experiments.cost_m) {
    for (auto& t : thresholds(ctx, m)) {
      csv << t["m"] << ',' << t["n"] << ',' << t["min_viable_price_usd"] << '\n';
      std::cout << "m=" << t["m"] << " n=" << t["n"] << " threshold " << t["min_viable_price_usd"] << " USD\n";
      j.push_back(t);
    }
  }
  out.write_json(std::to_string(ctx.seeds.front()), {{"round_observer_cost", ctx.cfg.experiments.round_observer_cost},
                                                     {"thresholds", j}});
  out.write(std::to_string(ctx.seeds.front()), "csv", csv.str());
}

void cmd_veto_demo(Context& ctx, const Output& out) {
  for (auto seed : ctx.seeds) {
    EcosystemConfig eco = ctx.have_config && !ctx.cfg.ecosystem.double_spends.empty() ? ctx.cfg.ecosystem
                                                                                       : veto_demo_config(seed);
    eco.seed = seed;
    auto report = run(eco);
    auto check = check_double_spends(eco, report);
    auto j = to_json(report);
    j["veto_check"] = {{"sender_zeroed", check.sender_zeroed},
                       {"none_finalized", check.none_finalized},
                       {"single_winner", check.single_winner},
                       {"conserved", check.conserved},
                       {"problems", check.problems}};
    out.write_json(std::to_string(seed), j);
    for (const auto& p : check.problems) ctx.failures.push_back("seed " + std::to_string(seed) + ": " + p);
    check_run(ctx, report, "seed " + std::to_string(seed));
    const auto& s = report.final_states.front();
    std::cout << "seed " << seed << ": burned " << s.burned << (check.ok() ? ", veto ok\n" : ", veto FAILED\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  auto& opt = ctx.opt;
  CLI::App app{"Cross-blockchain token transfer simulator"};
  app.add_option("--campaign", opt.campaign, "run, sweep-validity, contest-scaling, cost-report, incentive, veto-demo")
      ->check(CLI::IsMember({"run", "sweep-validity", "contest-scaling", "cost-report", "incentive", "veto-demo"}));
  app.add_option("--config", opt.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "output directory");
  app.add_option("--seeds", opt.seeds, "seed list, e.g. 1,2,5-8");
  app.add_option("--reps", opt.reps, "repetitions per point (contest-scaling)")->check(CLI::PositiveNumber);
  app.add_option("--jitter", opt.jitter, "block interval jitter fraction")->check(CLI::Range(0.0, 0.999));
  app.add_option("--round-observer-cost", opt.round_observer_cost, "round observer cost to cents for thresholds");
  app.add_flag("--serial", opt.serial, "run campaign points serially");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!opt.config.empty()) {
      ctx.cfg = load_config(opt.config);
      ctx.have_config = true;
    } else {
      ctx.cfg = default_config();
    }
    if (opt.jitter) {
      for (auto& c : ctx.cfg.ecosystem.chains) c.jitter = *opt.jitter;
    }
    if (opt.round_observer_cost) ctx.cfg.experiments.round_observer_cost = *opt.round_observer_cost;
    if (!opt.seeds.empty()) {
      ctx.seeds = parse_seeds(opt.seeds);
    } else if (opt.campaign == "sweep-validity") {
      ctx.seeds = seeds_or_default(ctx.cfg.experiments);
    } else {
      ctx.seeds = {ctx.cfg.ecosystem.seed};
    }
    ctx.exec = opt.serial ? Execution::serial : Execution::parallel;

    Output out(opt.out, opt.campaign);
    if (opt.campaign == "run") {
      cmd_run(ctx, out);
    } else if (opt.campaign == "sweep-validity") {
      cmd_sweep(ctx, out);
    } else if (opt.campaign == "contest-scaling") {
      cmd_scaling(ctx, out);
    } else if (opt.campaign == "cost-report") {
      cmd_cost(ctx, out);
    } else if (opt.campaign == "incentive") {
      cmd_incentive(ctx, out);
    } else {
      cmd_veto_demo(ctx, out);
    }

    if (!ctx.failures.empty()) {
      std::cerr << json{{"campaign", opt.campaign}, {"failures", ctx.failures}}.dump() << '\n';
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << json{{"campaign", opt.campaign}, {"error", e.what()}}.dump() << '\n';
    return 2;
  }
}
