// pfreq: generalized principal frequencies and their inequalities.
//
//   pfreq compute --shape disk.json --q 1.5 [--h 0.01]
//   pfreq verify  --shape square.json --q 1 [--checks FK,HPWEAK]
//   pfreq scan    --family family.json --q 1 --alpha 0:2:0.25
//   pfreq slab    --q 1 --L 2,4,8,16
//   pfreq pi2q    --q 1.5 [--n 4096]
//   pfreq suite   [--config run.json]
//
// Exit status: 0 everything holds, 2 some inequality is violated, 1 error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pfreq/bounds.hpp"
#include "pfreq/cli.hpp"
#include "pfreq/error.hpp"
#include "pfreq/kernels.hpp"
#include "pfreq/onedim.hpp"

using namespace pfreq;
using nlohmann::json;

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

void parse_alpha(const std::string& s, RunConfig& c) {
  std::vector<double> parts;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ':');) parts.push_back(std::stod(item));
  if (parts.size() != 3) throw InvalidInput("--alpha expects lo:hi:step");
  c.alpha_lo = parts[0];
  c.alpha_hi = parts[1];
  c.alpha_step = parts[2];
}

// A family is a JSON file (an array of shapes, or {"shapes": [...]} and/or
// {"family": "<descriptor>"}) or, failing that, a descriptor string.
std::vector<NamedShape> load_family(const std::string& arg, std::uint64_t seed) {
  if (!std::filesystem::exists(arg)) return generate_family(arg, seed);
  std::ifstream in(arg);
  const json j = json::parse(in);
  std::vector<NamedShape> out;
  const json* list = nullptr;
  if (j.is_array()) {
    list = &j;
  } else {
    if (j.contains("family")) out = generate_family(j.at("family").get<std::string>(), j.value("seed", seed));
    if (j.contains("shapes")) list = &j.at("shapes");
  }
  if (list != nullptr) {
    int k = 0;
    for (const json& s : *list) out.push_back(shape_from_json(s, "shape-" + std::to_string(k++)));
  }
  return out;
}

int verdict_exit(const std::vector<BoundReport>& reports) {
  for (const BoundReport& b : reports) {
    if (b.applicable && b.verdict == Verdict::kViolated) return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized principal frequencies lambda_{2,q}, torsion and sharp inequality checks"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int jobs = 0;
  app.add_option("--config", config_path, "Run configuration (JSON)");
  app.add_option("--out", out_dir, "Output directory (FREQ_OUT overrides)");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--jobs", jobs, "Parallel work items / kernel threads");

  std::string shape_path, checks_arg, family_arg, alpha_arg, lengths_arg = "2,4,8,16";
  double q = 2.0, h = 0.0;
  int n = 4096;

  auto* compute = app.add_subcommand("compute", "lambda_{2,q} of one shape");
  compute->add_option("--shape", shape_path, "Shape JSON file")->required();
  compute->add_option("--q", q, "Exponent q >= 1")->required();
  compute->add_option("--h", h, "Grid spacing (default: per-shape)");

  auto* verify = app.add_subcommand("verify", "Inequality reports for one shape");
  verify->add_option("--shape", shape_path, "Shape JSON file")->required();
  verify->add_option("--q", q, "Exponent q >= 1")->required();
  verify->add_option("--h", h, "Grid spacing (default: per-shape)");
  verify->add_option("--checks", checks_arg, "Comma-separated ids (default: all)");

  auto* scan = app.add_subcommand("scan", "alpha scan over a shape family");
  scan->add_option("--family", family_arg, "Family JSON file or descriptor")->required();
  scan->add_option("--q", q, "Exponent q >= 1")->required();
  scan->add_option("--alpha", alpha_arg, "lo:hi:step");
  scan->add_option("--h", h, "Grid spacing (default: per-shape)");

  auto* slabs = app.add_subcommand("slab", "Slab asymptotics");
  slabs->add_option("--q", q, "Exponent q >= 1")->required();
  slabs->add_option("--L", lengths_arg, "Comma-separated slab lengths");
  slabs->add_option("--h", h, "Grid spacing (default: per-shape)");

  auto* pi = app.add_subcommand("pi2q", "One-dimensional constant pi_{2,q}");
  pi->add_option("--q", q, "Exponent q >= 1")->required();
  pi->add_option("--n", n, "Intervals");

  auto* suite = app.add_subcommand("suite", "Full verification suite");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (const char* env = std::getenv("FREQ_OUT"); env != nullptr && *env != '\0') cfg.out = env;
    if (app.count("--seed") > 0) cfg.seed = seed;
    if (jobs > 0) cfg.jobs = jobs;
    if (h > 0.0) cfg.h = h;
    const bool write_files = !out_dir.empty() || !config_path.empty() || std::getenv("FREQ_OUT") != nullptr;
    // Work items fan out in the suite; elsewhere the threads go to the kernels.
    if (!suite->parsed()) kernels::set_threads(cfg.jobs);
    const SolverOptions opts = cfg.solver();

    if (compute->parsed()) {
      const NamedShape s = load_shape_file(shape_path);
      const FrequencyResult r = lambda_2q_refined(s.shape, q, cfg.h, opts);
      json j = to_json(r);
      j["shape_id"] = s.id;
      std::cout << j.dump(2) << "\n";
      if (write_files) write_text(cfg.out + "/compute.json", j.dump(2) + "\n");
      return 0;
    }

    if (verify->parsed()) {
      const NamedShape s = load_shape_file(shape_path);
      const ShapeFacts g = facts_of(s);
      std::set<std::string> wanted;
      std::stringstream in(checks_arg);
      for (std::string id; std::getline(in, id, ',');) {
        if (!id.empty()) wanted.insert(id);
      }
      auto want = [&](const std::string& id) { return wanted.empty() || wanted.count(id) > 0; };

      const FrequencyResult r = lambda_2q_refined(s.shape, q, cfg.h, opts);
      std::vector<BoundReport> reports;
      for (BoundReport& b : check_classical(g, q, r)) reports.push_back(std::move(b));
      if (q <= 2.0) reports.push_back(check_lower(g, q, r));
      reports.push_back(check_upper(g, q, r));
      if (const auto* poly = std::get_if<ConvexPolygon>(&s.shape); poly != nullptr && q < 2.0 &&
                                                                    (want("CERTIFICATE") || want("CERTIFICATE_CHAIN"))) {
        const Certificate c = certificate_upper(*poly, q, onedim::ball_extremal(q, 2).profile, r, s.id);
        reports.push_back(c.domination);
        reports.push_back(c.chain);
      }
      if (want("MPS_LOWER") || want("MPS_UPPER") || want("BFNT_IMPROVED")) {
        const FrequencyResult t = q == 1.0 ? r : lambda_2q_refined(s.shape, 1.0, cfg.h, opts);
        for (BoundReport& b : check_torsion_double(g, t)) reports.push_back(std::move(b));
        if (want("BFNT_IMPROVED")) {
          const FrequencyResult l2 = q == 2.0 ? r : lambda_2q_refined(s.shape, 2.0, cfg.h, opts);
          reports.push_back(check_bfnt(g, l2, t));
        }
      }
      std::erase_if(reports, [&](const BoundReport& b) { return !want(b.id); });
      json arr = json::array();
      for (const BoundReport& b : reports) arr.push_back(to_json(b));
      std::cout << arr.dump(2) << "\n";
      write_text(cfg.out + "/verify.json", arr.dump(2) + "\n");
      write_text(cfg.out + "/verify.csv", bounds_csv(reports));
      return verdict_exit(reports);
    }

    if (scan->parsed()) {
      if (!alpha_arg.empty()) parse_alpha(alpha_arg, cfg);
      const std::vector<NamedShape> family = load_family(family_arg, cfg.seed);
      std::vector<ScanEntry> entries;
      for (const NamedShape& s : family) {
        const ShapeFacts g = facts_of(s);
        const FrequencyResult r = lambda_2q(s.shape, q, cfg.h, opts);
        entries.push_back({g.id, g.slab_length, r.lambda, g.measure, g.inradius, g.dim});
      }
      const AlphaScanResult res = alpha_scan(std::move(entries), q, cfg.alphas());
      std::cout << to_json(res).dump(2) << "\n";
      write_text(cfg.out + "/scan.json", to_json(res).dump(2) + "\n");
      write_text(cfg.out + "/scan.tsv", scan_tsv({res}));
      return 0;
    }

    if (slabs->parsed()) {
      const SlabTable t = slab_asymptotics(q, parse_list(lengths_arg), cfg.h, opts);
      std::cout << to_json(t).dump(2) << "\n";
      write_text(cfg.out + "/slabs.json", to_json(t).dump(2) + "\n");
      write_text(cfg.out + "/slabs.tsv", slab_tsv({t}));
      return t.passes ? 0 : 2;
    }

    if (pi->parsed()) {
      const onedim::PoincareConstant p = onedim::pi_2q(q, n);
      if (!p.warning.empty()) std::cerr << "warning: " << p.warning << "\n";
      std::cout << to_json(p).dump(2) << "\n";
      return 0;
    }

    if (suite->parsed()) {
      const SuiteReport rep = run_suite(cfg);
      write_suite(rep, cfg.out);
      const json summary{{"out", cfg.out},
                         {"shapes", rep.shape_ids.size()},
                         {"reports", rep.bounds.size()},
                         {"violated", rep.violated()},
                         {"errors", rep.errors},
                         {"exit_code", rep.exit_code()}};
      std::cout << summary.dump(2) << "\n";
      return rep.exit_code();
    }
  } catch (const std::exception& e) {
    std::cerr << "pfreq: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
