#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dextt/costmodel.hpp"
#include "dextt/ecosystem.hpp"

namespace dextt {

/// Syntax or schema error; what() reads "<source>:<line>[:<col>]: <message>".
class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }  // 0 when only the line is known

 private:
  std::size_t line_;
  std::size_t column_;
};

struct ExperimentSettings {
  std::vector<Seconds> validity_points;  // empty: 10, 15, ..., 70
  std::vector<std::size_t> n_values{4, 16, 64};
  std::size_t runs = 200;
  std::vector<std::uint64_t> seeds;  // empty: 1..10
  std::vector<std::size_t> cost_m{10};
  std::vector<std::size_t> cost_n{10, 100, 1000};
  bool round_observer_cost = true;
};

struct ProjectConfig {
  EcosystemConfig ecosystem;
  GasTable gas;
  PriceModel price;
  ExperimentSettings experiments;
};

/// Defaults: three 13 s chains, no agents.
ProjectConfig default_config();

ProjectConfig parse_config(std::string_view text, const std::string& source = "<config>");
ProjectConfig load_config(const std::filesystem::path& path);

std::vector<Seconds> validity_points(const ExperimentSettings& settings);
std::vector<std::uint64_t> seeds_or_default(const ExperimentSettings& settings);

}  // namespace dextt
