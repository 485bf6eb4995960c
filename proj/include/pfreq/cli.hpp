#pragma once

// Suite orchestration, shape families and report serialization behind the
// pfreq command-line tool.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfreq/bounds.hpp"
#include "pfreq/shape.hpp"
#include "pfreq/solver.hpp"

namespace pfreq {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kDefaultFamily = "disk square hexagon random:3 slabs:2,4,8,16 union";

struct RunConfig {
  double h = 0.0;  // 0: per-shape default spacing
  double lambda_rtol = 1e-10;
  std::vector<double> qs{1.0, 1.5, 2.0, 3.0};
  double alpha_lo = 0.0;
  double alpha_hi = 2.0;
  double alpha_step = 0.25;
  std::vector<std::string> shape_files;
  std::string family = kDefaultFamily;
  std::string out = "pfreq-out";
  std::uint64_t seed = 42;
  int jobs = 1;
  bool refine = true;  // h vs 2h study for error estimates
  int trials = 1000;   // randomized trials per property summary

  std::vector<double> alphas() const;
  SolverOptions solver() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);
RunConfig load_config(const std::string& path);

/// Whitespace-separated tokens: disk, square, hexagon, union, ball:N,
/// polygon-disk:m, slabs:L1,L2,..., regular:m1,m2,..., random:K, seed:S.
/// A seed token applies to every random token in the descriptor.
std::vector<NamedShape> generate_family(const std::string& descriptor, std::uint64_t seed);

struct ShapeResult {
  std::string shape_id;
  double q = 0.0;
  FrequencyResult result;
  std::string error;  // non-empty when the solve failed
};

struct PropertySummary {
  std::string name;
  int trials = 0;
  int failures = 0;
  double worst = 0.0;  // largest violation observed (<= 0 when none)
};

struct SuiteReport {
  RunConfig config;
  std::vector<std::string> shape_ids;
  std::vector<ShapeResult> frequencies;
  std::vector<BoundReport> bounds;
  std::vector<AlphaScanResult> scans;
  std::vector<SlabTable> slabs;
  std::vector<PropertySummary> properties;
  std::vector<std::string> errors;
  nlohmann::json provenance;

  int violated() const;  // applicable reports with verdict violated
  int exit_code() const; // 0 all hold, 2 a violation, 1 an execution error
};

SuiteReport run_suite(const RunConfig& config);

/// Randomized identity checks on exact geometry and the 1D utilities.
std::vector<PropertySummary> run_properties(std::uint64_t seed, int trials);

nlohmann::json to_json(const FrequencyResult& r);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const AlphaScanResult& r);
nlohmann::json to_json(const SlabTable& t);
nlohmann::json to_json(const onedim::PoincareConstant& p);
nlohmann::json to_json(const SuiteReport& r);

/// Shortest round-trip decimal.
std::string format_number(double v);

std::string bounds_csv(const std::vector<BoundReport>& reports);
std::string frequencies_csv(const std::vector<ShapeResult>& rows);
/// alpha, shape id, value
std::string scan_tsv(const std::vector<AlphaScanResult>& scans);
/// q, L, lambda, normalized
std::string slab_tsv(const std::vector<SlabTable>& tables);

/// Writes suite.json, bounds.csv, frequencies.csv, scan.tsv and slabs.tsv.
void write_suite(const SuiteReport& r, const std::string& dir);
void write_text(const std::string& path, const std::string& text);

}  // namespace pfreq
