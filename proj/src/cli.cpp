#include "pfreq/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pfreq/error.hpp"
#include "pfreq/onedim.hpp"

namespace pfreq {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidInput("not a number: '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidInput("not an unsigned integer: '" + s + "'");
  return v;
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ConvexPolygon random_hull(std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<Vec2> pts(12);
    for (Vec2& p : pts) p = {2.0 * uniform(rng) - 1.0, 2.0 * uniform(rng) - 1.0};
    try {
      return convex_hull(std::move(pts));
    } catch (const InvalidInput&) {
    }
  }
  throw InvalidInput("could not generate a non-degenerate random hull");
}

}  // namespace

std::vector<double> RunConfig::alphas() const {
  std::vector<double> a;
  if (!(alpha_step > 0.0)) throw InvalidInput("alpha step must be positive");
  const auto count = static_cast<int>(std::floor((alpha_hi - alpha_lo) / alpha_step + 1e-9));
  for (int k = 0; k <= count; ++k) a.push_back(alpha_lo + k * alpha_step);
  return a;
}

SolverOptions RunConfig::solver() const {
  SolverOptions o;
  o.lambda_rtol = lambda_rtol;
  return o;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.h = j.value("h", c.h);
  c.lambda_rtol = j.value("lambda_rtol", c.lambda_rtol);
  if (j.contains("q")) c.qs = j.at("q").get<std::vector<double>>();
  if (j.contains("alpha")) {
    const json& a = j.at("alpha");
    c.alpha_lo = a.value("lo", c.alpha_lo);
    c.alpha_hi = a.value("hi", c.alpha_hi);
    c.alpha_step = a.value("step", c.alpha_step);
  }
  if (j.contains("shapes")) c.shape_files = j.at("shapes").get<std::vector<std::string>>();
  c.family = j.value("family", c.family);
  c.out = j.value("out", c.out);
  c.seed = j.value("seed", c.seed);
  c.jobs = j.value("jobs", c.jobs);
  c.refine = j.value("refine", c.refine);
  c.trials = j.value("trials", c.trials);
  if (c.h < 0.0) throw InvalidInput("config: h must be positive (or 0 for the default)");
  for (double q : c.qs) {
    if (!(q >= 1.0)) throw InvalidInput("config: q values must be >= 1");
  }
  if (c.jobs < 1) throw InvalidInput("config: jobs must be at least 1");
  return c;
}

json to_json(const RunConfig& c) {
  return json{{"h", c.h},
              {"lambda_rtol", c.lambda_rtol},
              {"q", c.qs},
              {"alpha", {{"lo", c.alpha_lo}, {"hi", c.alpha_hi}, {"step", c.alpha_step}}},
              {"shapes", c.shape_files},
              {"family", c.family},
              {"out", c.out},
              {"seed", c.seed},
              {"jobs", c.jobs},
              {"refine", c.refine},
              {"trials", c.trials}};
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path);
  return config_from_json(json::parse(in));
}

std::vector<NamedShape> generate_family(const std::string& descriptor, std::uint64_t seed) {
  std::istringstream in(descriptor);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) {
    if (t.rfind("seed:", 0) == 0) seed = parse_u64(t.substr(5));
    else tokens.push_back(t);
  }
  std::mt19937_64 rng(seed);
  std::vector<NamedShape> out;
  int random_count = 0;
  for (const std::string& t : tokens) {
    const auto colon = t.find(':');
    const std::string head = t.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : t.substr(colon + 1);
    if (head == "disk") {
      out.push_back({"disk", BallShape(2, 1.0), 0.0});
    } else if (head == "square") {
      out.push_back({"square", axis_box({0.0, 0.0}, {1.0, 1.0}), 0.0});
    } else if (head == "hexagon") {
      out.push_back({"hexagon", regular_polygon(6, 1.0), 0.0});
    } else if (head == "union") {
      out.push_back({"union", UnionShape({BallShape(2, 1.0, {-1.5, 0.0}), BallShape(2, 1.0, {1.5, 0.0})}), 0.0});
    } else if (head == "ball") {
      const int n = static_cast<int>(parse_u64(arg));
      out.push_back({"ball-" + arg, BallShape(n, 1.0), 0.0});
    } else if (head == "polygon-disk") {
      out.push_back({"polygon-disk-" + arg, disk_polygon(static_cast<int>(parse_u64(arg)), 1.0), 0.0});
    } else if (head == "slabs") {
      for (const std::string& l : split(arg, ',')) {
        const double L = parse_double(l);
        if (!(L > 0.0)) throw InvalidInput("slab length must be positive");
        out.push_back({"slab-" + l, slab(L), L});
      }
    } else if (head == "regular") {
      for (const std::string& m : split(arg, ',')) {
        out.push_back({"regular-" + m, regular_polygon(static_cast<int>(parse_u64(m)), 1.0), 0.0});
      }
    } else if (head == "random") {
      const auto k = parse_u64(arg);
      for (std::uint64_t i = 0; i < k; ++i) {
        out.push_back({"random-" + std::to_string(random_count++), random_hull(rng), 0.0});
      }
    } else {
      throw InvalidInput("unknown family token '" + t + "'");
    }
  }
  return out;
}

int SuiteReport::violated() const {
  int n = 0;
  for (const BoundReport& b : bounds) n += b.applicable && b.verdict == Verdict::kViolated;
  for (const PropertySummary& p : properties) n += p.failures > 0;
  return n;
}

int SuiteReport::exit_code() const {
  if (violated() > 0) return 2;
  return errors.empty() ? 0 : 1;
}

std::vector<PropertySummary> run_properties(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::vector<PropertySummary> out;
  auto record = [&](const char* name, auto&& trial) {
    PropertySummary p{name, trials, 0, -std::numeric_limits<double>::infinity()};
    for (int t = 0; t < trials; ++t) {
      const double v = trial();  // > 0 is a violation
      p.worst = std::max(p.worst, v);
      p.failures += v > 0.0;
    }
    out.push_back(p);
  };

  record("gauge_homogeneity", [&] {
    const ConvexPolygon poly = center_at_chebyshev(random_hull(rng));
    const Vec2 x{4.0 * uniform(rng) - 2.0, 4.0 * uniform(rng) - 2.0};
    const double s = 0.1 + 5.0 * uniform(rng);
    const double a = minkowski_gauge(poly, s * x).value;
    const double b = s * minkowski_gauge(poly, x).value;
    return std::abs(a - b) - 1e-12 * std::max(1.0, std::abs(b));
  });
  record("divergence_identity", [&] {
    const ConvexPolygon poly = center_at_chebyshev(random_hull(rng));
    const double area = measure(poly);
    return std::abs(boundary_integrals(poly).plus - 2.0 * area) - 1e-12 * area;
  });
  record("normal_product_bound", [&] {
    const ConvexPolygon poly = center_at_chebyshev(random_hull(rng));
    const NormalProductCheck c = normal_product_check(poly);
    return c.inradius - c.min_offset - 1e-12;
  });
  record("distance_concavity", [&] {
    const ConvexPolygon poly = random_hull(rng);
    const auto v = poly.vertices();
    auto sample = [&] {
      // Random convex combination of three vertices: inside the closure.
      double w[3] = {uniform(rng), uniform(rng), uniform(rng)};
      const double s = w[0] + w[1] + w[2];
      Vec2 p{};
      for (int k = 0; k < 3; ++k) p = p + (w[k] / s) * v[static_cast<std::size_t>(rng() % v.size())];
      return p;
    };
    const Vec2 x = sample(), y = sample();
    const double s = uniform(rng);
    const double mid = distance_to_boundary(poly, s * x + (1.0 - s) * y);
    return s * distance_to_boundary(poly, x) + (1.0 - s) * distance_to_boundary(poly, y) - mid - 1e-12;
  });
  record("monotone_average", [&] {
    const int n = 64;
    std::vector<double> inc(static_cast<std::size_t>(n));
    for (double& d : inc) d = uniform(rng);
    std::sort(inc.begin(), inc.end());
    std::vector<double> xi(static_cast<std::size_t>(n) + 1, 0.0), psi(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i < n; ++i) xi[static_cast<std::size_t>(i) + 1] = xi[static_cast<std::size_t>(i)] + inc[static_cast<std::size_t>(i)];
    for (double& p : psi) p = uniform(rng);
    std::sort(psi.begin(), psi.end(), std::greater<>());
    const auto c = onedim::chebyshev_like_check(xi, psi, 1.0 + uniform(rng));
    return c.lhs - c.rhs - 1e-9;
  });
  return out;
}

SuiteReport run_suite(const RunConfig& config) {
  SuiteReport rep;
  rep.config = config;
  const std::string started = utc_now();

  std::vector<NamedShape> shapes;
  try {
    shapes = generate_family(config.family, config.seed);
    for (const std::string& f : config.shape_files) shapes.push_back(load_shape_file(f));
  } catch (const std::exception& e) {
    rep.errors.push_back(std::string("shape ingestion: ") + e.what());
  }
  for (const NamedShape& s : shapes) rep.shape_ids.push_back(s.id);

  // Every shape is solved at the requested q plus q = 1 and q = 2, which the
  // torsion and BFNT checks need.
  std::vector<double> qs = config.qs;
  if (!shapes.empty()) {
    qs.push_back(1.0);
    qs.push_back(2.0);
  }
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());

  struct Item {
    std::size_t shape;
    double q;
  };
  std::vector<Item> items;
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    const int dim = dimension(shapes[s].shape);
    for (double q : qs) {
      if (q < onedim::critical_exponent(dim)) items.push_back({s, q});
    }
  }
  std::vector<ShapeResult> results(items.size());
  const SolverOptions opts = config.solver();
#ifdef _OPENMP
  omp_set_max_active_levels(1);
#endif
  const auto n_items = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.jobs)
  for (std::ptrdiff_t k = 0; k < n_items; ++k) {
    const Item& it = items[static_cast<std::size_t>(k)];
    ShapeResult& r = results[static_cast<std::size_t>(k)];
    r.shape_id = shapes[it.shape].id;
    r.q = it.q;
    try {
      r.result = config.refine ? lambda_2q_refined(shapes[it.shape].shape, it.q, config.h, opts)
                               : lambda_2q(shapes[it.shape].shape, it.q, config.h, opts);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  }

  std::map<std::pair<std::size_t, double>, const FrequencyResult*> lookup;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (!results[k].error.empty()) {
      rep.errors.push_back(results[k].shape_id + " q=" + format_number(results[k].q) + ": " + results[k].error);
    } else {
      lookup[{items[k].shape, items[k].q}] = &results[k].result;
    }
  }
  auto find = [&](std::size_t s, double q) -> const FrequencyResult* {
    auto it = lookup.find({s, q});
    return it == lookup.end() ? nullptr : it->second;
  };

  std::map<double, onedim::RadialProfile> profiles;
  for (double q : config.qs) {
    if (q < 2.0) profiles.emplace(q, onedim::ball_extremal(q, 2).profile);
  }

  for (std::size_t s = 0; s < shapes.size(); ++s) {
    const ShapeFacts g = facts_of(shapes[s]);
    try {
      for (double q : config.qs) {
        const FrequencyResult* r = find(s, q);
        if (r == nullptr) continue;
        for (BoundReport& b : check_classical(g, q, *r)) rep.bounds.push_back(std::move(b));
        if (q <= 2.0) rep.bounds.push_back(check_lower(g, q, *r));
        rep.bounds.push_back(check_upper(g, q, *r));
        if (const auto* poly = std::get_if<ConvexPolygon>(&shapes[s].shape); poly != nullptr && q < 2.0) {
          const Certificate c = certificate_upper(*poly, q, profiles.at(q), *r, g.id);
          rep.bounds.push_back(c.domination);
          rep.bounds.push_back(c.chain);
        }
      }
      const FrequencyResult* t = find(s, 1.0);
      const FrequencyResult* l2 = find(s, 2.0);
      if (t != nullptr) {
        for (BoundReport& b : check_torsion_double(g, *t)) rep.bounds.push_back(std::move(b));
      }
      if (t != nullptr && l2 != nullptr) rep.bounds.push_back(check_bfnt(g, *l2, *t));
    } catch (const std::exception& e) {
      rep.errors.push_back(g.id + ": " + e.what());
    }
  }

  const std::vector<double> alphas = config.alphas();
  for (double q : config.qs) {
    std::vector<ScanEntry> entries;
    std::vector<SlabRow> slab_rows;
    for (std::size_t s = 0; s < shapes.size(); ++s) {
      const FrequencyResult* r = find(s, q);
      if (r == nullptr) continue;
      const ShapeFacts g = facts_of(shapes[s]);
      entries.push_back({g.id, g.slab_length, r->lambda, g.measure, g.inradius, g.dim});
      if (g.slab_length > 0.0) slab_rows.push_back({g.slab_length, r->lambda, 0.0, r->error_estimate});
    }
    if (!entries.empty()) rep.scans.push_back(alpha_scan(std::move(entries), q, alphas));
    if (slab_rows.size() >= 2) rep.slabs.push_back(make_slab_table(q, std::move(slab_rows)));
  }

  if (!shapes.empty() && config.trials > 0) rep.properties = run_properties(config.seed, config.trials);

  for (std::size_t k = 0; k < items.size(); ++k) {
    if (results[k].error.empty()) rep.frequencies.push_back(std::move(results[k]));
  }

  rep.provenance = json{{"version", kVersion},
                        {"config_hash", fnv1a_hex(to_json(config).dump())},
                        {"seed", config.seed},
                        {"jobs", config.jobs},
                        {"started", started},
                        {"finished", utc_now()}};
  return rep;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const FrequencyResult& r) {
  return json{{"q", r.q},
              {"lambda", r.lambda},
              {"h", r.h},
              {"iterations", r.iterations},
              {"residual", r.residual},
              {"norm_check", r.norm_check},
              {"error_estimate", r.error_estimate},
              {"method", r.method},
              {"nodes", r.nodes}};
}

json to_json(const BoundReport& r) {
  return json{{"id", r.id},
              {"shape_id", r.shape_id},
              {"q", r.q},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"slack", r.slack},
              {"relative_slack", r.relative_slack},
              {"tolerance", r.tolerance},
              {"verdict", to_string(r.verdict)},
              {"applicable", r.applicable},
              {"note", r.note}};
}

json to_json(const AlphaScanResult& r) {
  json entries = json::array();
  for (const ScanEntry& e : r.entries) {
    entries.push_back({{"shape_id", e.shape_id},
                       {"slab_length", e.slab_length},
                       {"lambda", e.lambda},
                       {"measure", e.measure},
                       {"inradius", e.inradius},
                       {"dim", e.dim}});
  }
  json rows = json::array();
  for (const AlphaRow& a : r.rows) {
    rows.push_back({{"alpha", a.alpha},
                    {"beta", a.beta},
                    {"values", a.values},
                    {"min", a.min},
                    {"max", a.max},
                    {"argmin", a.argmin},
                    {"slab_trend", to_string(a.slab_trend)},
                    {"expected", to_string(a.expected)}});
  }
  return json{{"q", r.q}, {"threshold", r.threshold}, {"entries", entries}, {"rows", rows}};
}

json to_json(const SlabTable& t) {
  json rows = json::array();
  for (const SlabRow& r : t.rows) {
    rows.push_back({{"L", r.length}, {"lambda", r.lambda}, {"normalized", r.normalized}, {"error_estimate", r.error_estimate}});
  }
  return json{{"q", t.q},
              {"bounded_case", t.bounded_case},
              {"limit", t.limit},
              {"rows", rows},
              {"monotone", t.monotone},
              {"final_gap", t.final_gap},
              {"passes", t.passes}};
}

json to_json(const onedim::PoincareConstant& p) {
  json j{{"q", p.q}, {"value", p.value}, {"resolution", p.resolution}, {"residual", p.residual}, {"iterations", p.iterations}};
  if (!p.warning.empty()) j["warning"] = p.warning;
  return j;
}

json to_json(const SuiteReport& r) {
  json freqs = json::array();
  for (const ShapeResult& s : r.frequencies) {
    json j = to_json(s.result);
    j["shape_id"] = s.shape_id;
    freqs.push_back(std::move(j));
  }
  json bounds = json::array();
  std::map<std::string, int> counts{{"holds", 0}, {"violated", 0}, {"equality-within-tolerance", 0}, {"not-applicable", 0}};
  std::map<double, std::pair<double, std::string>> hpq;
  for (const BoundReport& b : r.bounds) {
    bounds.push_back(to_json(b));
    ++counts[b.applicable ? to_string(b.verdict) : "not-applicable"];
    if (b.id == "HPQ" && b.applicable) {
      auto it = hpq.find(b.q);
      if (it == hpq.end() || b.rhs < it->second.first) hpq[b.q] = {b.rhs, b.shape_id};
    }
  }
  json hpq_json = json::array();
  for (const auto& [q, v] : hpq) hpq_json.push_back({{"q", q}, {"infimum", v.first}, {"shape_id", v.second}});
  json scans = json::array();
  for (const AlphaScanResult& s : r.scans) scans.push_back(to_json(s));
  json slabs = json::array();
  for (const SlabTable& t : r.slabs) slabs.push_back(to_json(t));
  json props = json::array();
  for (const PropertySummary& p : r.properties) {
    props.push_back({{"name", p.name}, {"trials", p.trials}, {"failures", p.failures}, {"worst", p.worst}});
  }
  return json{{"config", to_json(r.config)},
              {"shapes", r.shape_ids},
              {"frequencies", freqs},
              {"bounds", bounds},
              {"verdicts", counts},
              {"hpq_empirical_infimum", hpq_json},
              {"scans", scans},
              {"slabs", slabs},
              {"properties", props},
              {"errors", r.errors},
              {"exit_code", r.exit_code()},
              {"provenance", r.provenance}};
}

std::string bounds_csv(const std::vector<BoundReport>& reports) {
  std::string out = "id,shape_id,q,lhs,rhs,slack,relative_slack,tolerance,verdict,applicable,note\n";
  for (const BoundReport& b : reports) {
    out += b.id + ',' + csv_field(b.shape_id) + ',' + format_number(b.q) + ',' + format_number(b.lhs) + ',' +
           format_number(b.rhs) + ',' + format_number(b.slack) + ',' + format_number(b.relative_slack) + ',' +
           format_number(b.tolerance) + ',' + to_string(b.verdict) + ',' + (b.applicable ? "true" : "false") + ',' +
           csv_field(b.note) + '\n';
  }
  return out;
}

std::string frequencies_csv(const std::vector<ShapeResult>& rows) {
  std::string out = "shape_id,q,lambda,h,iterations,residual,norm_check,error_estimate,method,nodes\n";
  for (const ShapeResult& s : rows) {
    const FrequencyResult& r = s.result;
    out += csv_field(s.shape_id) + ',' + format_number(r.q) + ',' + format_number(r.lambda) + ',' + format_number(r.h) +
           ',' + std::to_string(r.iterations) + ',' + format_number(r.residual) + ',' + format_number(r.norm_check) +
           ',' + format_number(r.error_estimate) + ',' + r.method + ',' + std::to_string(r.nodes) + '\n';
  }
  return out;
}

std::string scan_tsv(const std::vector<AlphaScanResult>& scans) {
  std::string out = "q\talpha\tshape\tvalue\n";
  for (const AlphaScanResult& s : scans) {
    for (const AlphaRow& row : s.rows) {
      for (std::size_t k = 0; k < s.entries.size(); ++k) {
        const ScanEntry& e = s.entries[k];
        const std::string key = e.slab_length > 0.0 ? "L=" + format_number(e.slab_length) : e.shape_id;
        out += format_number(s.q) + '\t' + format_number(row.alpha) + '\t' + key + '\t' + format_number(row.values[k]) + '\n';
      }
    }
  }
  return out;
}

std::string slab_tsv(const std::vector<SlabTable>& tables) {
  std::string out = "q\tL\tlambda\tnormalized\n";
  for (const SlabTable& t : tables) {
    for (const SlabRow& r : t.rows) {
      out += format_number(t.q) + '\t' + format_number(r.length) + '\t' + format_number(r.lambda) + '\t' +
             format_number(r.normalized) + '\n';
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
  if (!out) throw InvalidInput("write failed for " + path);
}

void write_suite(const SuiteReport& r, const std::string& dir) {
  const std::filesystem::path d(dir);
  write_text((d / "suite.json").string(), to_json(r).dump(2) + "\n");
  write_text((d / "bounds.csv").string(), bounds_csv(r.bounds));
  write_text((d / "frequencies.csv").string(), frequencies_csv(r.frequencies));
  write_text((d / "scan.tsv").string(), scan_tsv(r.scans));
  write_text((d / "slabs.tsv").string(), slab_tsv(r.slabs));
}

}  // namespace pfreq
