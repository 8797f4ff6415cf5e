// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "kdph/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "kdph/filtration.hpp"
#include "kdph/kdistance.hpp"
#include "kdph/meb.hpp"
#include "kdph/projection.hpp"
#include "kdph/svg.hpp"

namespace kdph {

namespace {

constexpr std::int64_t kInt64Max = std::numeric_limits<std::int64_t>::max();

// Seed salts keep the pipeline's independent random stages decorrelated
// while still being pure functions of the config seed.
constexpr std::uint64_t kWidthSeedSalt = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kRadiusSeedSalt = 0xbf58476d1ce4e5b9ull;

constexpr int kAutoGwWidthSamples = 400;

std::string strip_comment(const std::string& line) {
  const std::size_t pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

double parse_field(const std::string& token, int line_no) {
  std::size_t a = 0;
  std::size_t b = token.size();
  while (a < b && std::isspace(static_cast<unsigned char>(token[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(token[b - 1]))) --b;
  double value = 0.0;
  const char* first = token.data() + a;
  const char* last = token.data() + b;
  const auto [end, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || end != last || first == last) {
    throw ParseError("non-numeric field '" + token.substr(a, b - a) + "'",
                     line_no);
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
  // Rejection sampling keeps the draw unbiased and the byte stream pinned.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

double rand_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::int64_t saturating_add(std::int64_t a, std::int64_t b) {
  return a > kInt64Max - b ? kInt64Max : a + b;
}

// Uniform c-subset of {0..m-1} by Floyd's algorithm, returned sorted.
std::vector<int> floyd_subset(std::mt19937_64& rng, int m, int c) {
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(c));
  for (int j = m - c; j < m; ++j) {
    const int t = static_cast<int>(
        rand_below(rng, static_cast<std::uint64_t>(j) + 1));
    if (std::find(chosen.begin(), chosen.end(), t) != chosen.end()) {
      chosen.push_back(j);
    } else {
      chosen.push_back(t);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

class StageTimer {
 public:
  void start() { t0_ = std::chrono::steady_clock::now(); }

  void stop(const std::string& stage) {
    const auto t1 = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration<double, std::milli>(t1 - t0_).count();
    stages_.emplace_back(stage, ms);
    total_ += ms;
  }

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    for (const auto& [name, ms] : stages_) j[name] = ms;
    j["total"] = total_;
    return j;
  }

 private:
  std::chrono::steady_clock::time_point t0_;
  std::vector<std::pair<std::string, double>> stages_;
  double total_ = 0.0;
};

struct RatioAudit {
  int checked = 0;
  int skipped = 0;  // degenerate zero denominators
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = -std::numeric_limits<double>::infinity();
  int violations = 0;

  void feed(double before, double after, double lo, double hi) {
    if (before == 0.0) {
      ++skipped;
      return;
    }
    const double r = after / before;
    ++checked;
    min_ratio = std::min(min_ratio, r);
    max_ratio = std::max(max_ratio, r);
    if (r < lo || r > hi) ++violations;
  }

  bool pass() const { return violations == 0; }

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    j["checked"] = checked;
    j["skipped_degenerate"] = skipped;
    if (checked > 0) {
      j["min_ratio"] = min_ratio;
      j["max_ratio"] = max_ratio;
    } else {
      j["min_ratio"] = nullptr;
      j["max_ratio"] = nullptr;
    }
    j["violations"] = violations;
    j["pass"] = pass();
    return j;
  }
};

void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& what) {
    throw ContractViolation("config: " + what);
  };
  if (c.input_path.empty()) fail("input path is empty");
  if (c.k < 1) fail("k must be >= 1");
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) fail("epsilon must lie in (0,1)");
  if (!(c.delta > 0.0 && c.delta < 1.0)) fail("delta must lie in (0,1)");
  if (!(c.jl_constant > 0.0)) fail("jl constant must be > 0");
  if (c.projector_kind != "gaussian" && c.projector_kind != "rademacher" &&
      c.projector_kind != "sparse" && c.projector_kind != "identity") {
    fail("unknown projector kind '" + c.projector_kind + "'");
  }
  if (c.filtration != "exact-cech" && c.filtration != "approx-cech" &&
      c.filtration != "rips") {
    fail("unknown filtration mode '" + c.filtration + "'");
  }
  if (c.max_homology_degree < 0) fail("max homology degree must be >= 0");
  if (!(c.alpha_max >= 0.0) || !std::isfinite(c.alpha_max)) {
    fail("alpha_max must be finite and >= 0");
  }
  if (c.budget < 1) fail("budget must be >= 1");
  if (c.probes < 1) fail("probes must be >= 1");
  if (c.radius_max_card < 2) fail("radius max cardinality must be >= 2");
}

int resolve_target_dim(const ExperimentConfig& c, const PointCloud& P) {
  const int D = P.dim();
  if (c.projector_kind == "identity") return D;
  if (c.target_dim == "auto-jl") {
    return jl_dimension(P.size(), c.epsilon, c.jl_constant);
  }
  if (c.target_dim == "auto-gw") {
    const PointCloud S = difference_set(P);
    const WidthEstimate w = estimate_gaussian_width(S, kAutoGwWidthSamples,
                                                    c.seed ^ kWidthSeedSalt);
    return gw_dimension(w.estimate, c.delta, c.epsilon);
  }
  int d = 0;
  const char* first = c.target_dim.data();
  const char* last = first + c.target_dim.size();
  const auto [end, ec] = std::from_chars(first, last, d);
  if (ec != std::errc{} || end != last || d < 1) {
    throw ContractViolation("config: target_dim must be auto-jl, auto-gw, "
                            "or a positive integer");
  }
  if (d > D) {
    throw ContractViolation(
        "config: explicit target dimension exceeds the ambient dimension");
  }
  return d;
}

ProjectorKind kind_from_string(const std::string& s) {
  if (s == "gaussian") return ProjectorKind::gaussian;
  if (s == "rademacher") return ProjectorKind::rademacher;
  return ProjectorKind::sparse_achlioptas;
}

}  // namespace

PointCloud load_points(const std::string& path, InputFormat format) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path + "'", 0);
  }
  std::vector<Point> rows;
  std::string line;
  int line_no = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = strip_comment(line);
    if (is_blank(body)) continue;
    std::vector<std::string> fields;
    if (format == InputFormat::csv) {
      fields = split_csv(body);
    } else {
      std::istringstream ss(body);
      std::string tok;
      while (ss >> tok) fields.push_back(tok);
    }
    if (dim < 0) {
      dim = static_cast<int>(fields.size());
    } else if (static_cast<int>(fields.size()) != dim) {
      throw ParseError("ragged row: expected " + std::to_string(dim) +
                           " columns, got " + std::to_string(fields.size()),
                       line_no);
    }
    Point p(dim);
    for (int j = 0; j < dim; ++j) {
      p[j] = parse_field(fields[static_cast<std::size_t>(j)], line_no);
    }
    rows.push_back(std::move(p));
  }
  if (rows.empty()) {
    throw ParseError("no data rows in '" + path + "'", 0);
  }
  return PointCloud(std::move(rows));
}

InputFormat infer_format(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path + "'", 0);
  }
  std::string line;
  while (std::getline(in, line)) {
    const std::string body = strip_comment(line);
    if (is_blank(body)) continue;
    return body.find(',') != std::string::npos ? InputFormat::csv
                                               : InputFormat::whitespace;
  }
  return InputFormat::whitespace;
}

SimplexSample sample_simplices_for_radius_check(const WeightedCloud& B,
                                                std::int64_t count,
                                                int max_card,
                                                std::uint64_t seed) {
  if (max_card < 2) {
    throw ContractViolation("sample_simplices: max_card must be >= 2");
  }
  if (count < 1) {
    throw ContractViolation("sample_simplices: count must be >= 1");
  }
  const int m = B.size();
  const int cmax = std::min(max_card, m);
  SimplexSample out;

  std::vector<std::int64_t> per_card(static_cast<std::size_t>(cmax) + 1, 0);
  std::int64_t available = 0;
  for (int c = 2; c <= cmax; ++c) {
    per_card[static_cast<std::size_t>(c)] = binomial_capped(m, c);
    available = saturating_add(available, per_card[static_cast<std::size_t>(c)]);
  }
  if (available == 0) {
    out.exhaustive = true;
    return out;
  }

  if (count >= available) {
    out.exhaustive = true;
    for (int c = 2; c <= cmax; ++c) {
      std::vector<int> idx(static_cast<std::size_t>(c));
      for (int i = 0; i < c; ++i) idx[static_cast<std::size_t>(i)] = i;
      while (true) {
        out.subsets.push_back(idx);
        int pos = c - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - c + pos) {
          --pos;
        }
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < c; ++i) {
          idx[static_cast<std::size_t>(i)] =
              idx[static_cast<std::size_t>(i - 1)] + 1;
        }
      }
    }
    return out;
  }

  std::mt19937_64 rng(seed);
  std::vector<double> cumulative;
  double total = 0.0;
  for (int c = 2; c <= cmax; ++c) {
    total += static_cast<double>(per_card[static_cast<std::size_t>(c)]);
    cumulative.push_back(total);
  }
  out.subsets.reserve(static_cast<std::size_t>(count));
  for (std::int64_t s = 0; s < count; ++s) {
    const double u = rand_unit(rng) * total;
    int c = 2;
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
      if (u < cumulative[i]) {
        c = 2 + static_cast<int>(i);
        break;
      }
      c = cmax;
    }
    out.subsets.push_back(floyd_subset(rng, m, c));
  }
  return out;
}

nlohmann::ordered_json strip_timings(nlohmann::ordered_json report) {
  report.erase("timings_ms");
  return report;
}

ExperimentReport run(const ExperimentConfig& config) {
  validate_config(config);
  StageTimer timer;

  timer.start();
  const InputFormat format = infer_format(config.input_path);
  const PointCloud P = load_points(config.input_path, format);
  timer.stop("load");

  const int n = P.size();
  const int D = P.dim();
  if (config.k > n) {
    throw ContractViolation("config: k exceeds the number of points");
  }

  timer.start();
  const int d = resolve_target_dim(config, P);
  timer.stop("dimension");

  timer.start();
  const bool projected = config.projector_kind != "identity";
  PointCloud Q = P;
  double scale = 1.0;
  if (projected) {
    const Projector f = sample_projector(
        D, d, kind_from_string(config.projector_kind), config.seed);
    scale = f.scale;
    Q = apply(f, P);
  }
  timer.stop("project");

  timer.start();
  const DistortionReport distortion = audit_distortion(P, Q, config.epsilon);
  timer.stop("audit");

  const double lo = 1.0 - config.epsilon - 1e-9;
  const double hi = 1.0 + config.epsilon + 1e-9;

  timer.start();
  RatioAudit pointwise;
  for (int i = 0; i < n; ++i) {
    const double before = k_distance(P[i], P, config.k).value;
    const double after = k_distance(Q[i], Q, config.k).value;
    pointwise.feed(before * before, after * after, lo, hi);
  }
  timer.stop("pointwise");

  timer.start();
  const bool exact_mode = config.filtration == "exact-cech";
  const WeightedCloud cloud_before =
      exact_mode ? barycenter_cloud(P, config.k, config.budget)
                 : assign_approx_weights(P, config.k);
  const WeightedCloud cloud_after =
      exact_mode ? barycenter_cloud(Q, config.k, config.budget)
                 : assign_approx_weights(Q, config.k);
  const SimplexSample sample = sample_simplices_for_radius_check(
      cloud_before, config.probes, config.radius_max_card,
      config.seed ^ kRadiusSeedSalt);
  RatioAudit radius;
  for (const std::vector<int>& subset : sample.subsets) {
    const double before = weighted_meb(cloud_before, subset).rad_sq;
    const double after = weighted_meb(cloud_after, subset).rad_sq;
    radius.feed(before, after, lo, hi);
  }
  timer.stop("radius");

  const int complex_dim = config.max_homology_degree + 1;
  timer.start();
  const FilteredComplex K_before =
      config.filtration == "rips"
          ? weighted_rips(cloud_before, complex_dim, config.alpha_max)
          : weighted_cech(cloud_before, complex_dim, config.alpha_max);
  timer.stop("filtration_before");
  timer.start();
  const FilteredComplex K_after =
      config.filtration == "rips"
          ? weighted_rips(cloud_after, complex_dim, config.alpha_max)
          : weighted_cech(cloud_after, complex_dim, config.alpha_max);
  timer.stop("filtration_after");

  timer.start();
  ExperimentReport report;
  report.diagrams_before =
      compute_persistence(K_before, config.max_homology_degree);
  timer.stop("persistence_before");
  timer.start();
  report.diagrams_after =
      compute_persistence(K_after, config.max_homology_degree);
  timer.stop("persistence_after");

  timer.start();
  const InterleavingCertificate cert = certify_interleaving(
      report.diagrams_before, report.diagrams_after, config.epsilon);
  report.beta = cert.beta;
  timer.stop("certificate");

  nlohmann::ordered_json& j = report.json;
  j["schema_version"] = 1;

  nlohmann::ordered_json jc;
  jc["input_path"] = config.input_path;
  jc["format"] = format == InputFormat::csv ? "csv" : "whitespace";
  jc["k"] = config.k;
  jc["epsilon"] = config.epsilon;
  jc["delta"] = config.delta;
  jc["projector_kind"] = config.projector_kind;
  jc["seed"] = config.seed;
  jc["target_dim"] = config.target_dim;
  jc["jl_constant"] = config.jl_constant;
  jc["filtration"] = config.filtration;
  jc["max_homology_degree"] = config.max_homology_degree;
  jc["alpha_max"] = config.alpha_max;
  jc["budget"] = config.budget;
  jc["probes"] = config.probes;
  jc["radius_max_card"] = config.radius_max_card;
  j["config"] = std::move(jc);

  j["input"] = {{"n_points", n}, {"ambient_dim", D}};

  nlohmann::ordered_json jp;
  jp["applied"] = projected;
  jp["target_dim"] = d;
  if (projected) {
    jp["scale"] = scale;
  } else {
    jp["scale"] = nullptr;
  }
  j["projection"] = std::move(jp);

  nlohmann::ordered_json jd;
  jd["epsilon_target"] = distortion.epsilon_target;
  jd["max_expansion"] = distortion.max_expansion;
  jd["max_contraction"] = distortion.max_contraction;
  jd["is_epsilon_distortion"] = distortion.is_epsilon_distortion;
  jd["worst_pair"] = {distortion.worst_pair.first,
                      distortion.worst_pair.second};
  jd["skipped_pairs"] = distortion.skipped_pairs;
  j["distortion"] = std::move(jd);

  nlohmann::ordered_json jk = pointwise.json();
  jk["k"] = config.k;
  jk["band"] = {lo, hi};
  j["pointwise_kdist"] = std::move(jk);

  nlohmann::ordered_json jr = radius.json();
  jr["cloud"] = exact_mode ? "barycentric" : "approx";
  jr["sampled"] = static_cast<std::int64_t>(sample.subsets.size());
  jr["exhaustive"] = sample.exhaustive;
  jr["max_card"] = config.radius_max_card;
  jr["band"] = {lo, hi};
  j["radius_checks"] = std::move(jr);

  // The guarantees are conditional on the distortion audit; each leg is
  // reported on its own and the implication is checked, never assumed.
  nlohmann::ordered_json ji;
  ji["distortion_pass"] = distortion.is_epsilon_distortion;
  ji["pointwise_pass"] = pointwise.pass();
  ji["radius_pass"] = radius.pass();
  ji["interleaving_pass"] = cert.passes;
  ji["conditionals_respected"] =
      !distortion.is_epsilon_distortion ||
      (pointwise.pass() && radius.pass() && cert.passes);
  j["implications"] = std::move(ji);

  nlohmann::ordered_json jf;
  jf["mode"] = config.filtration;
  jf["max_dim"] = complex_dim;
  jf["alpha_max"] = config.alpha_max;
  jf["before"] = {{"simplices", static_cast<std::int64_t>(
                                    K_before.simplices.size())},
                  {"clamped", K_before.clamped}};
  jf["after"] = {{"simplices", static_cast<std::int64_t>(
                                   K_after.simplices.size())},
                 {"clamped", K_after.clamped}};
  j["filtration"] = std::move(jf);

  j["diagrams_before"] = diagrams_to_json(report.diagrams_before);
  j["diagrams_after"] = diagrams_to_json(report.diagrams_after);

  nlohmann::ordered_json jl;
  jl["epsilon"] = cert.epsilon;
  jl["beta"] = cert.beta;
  jl["threshold_log_beta"] = std::log(cert.beta);
  jl["log_bottleneck"] = std::isfinite(cert.log_bottleneck)
                             ? nlohmann::ordered_json(cert.log_bottleneck)
                             : nlohmann::ordered_json("inf");
  nlohmann::ordered_json per_degree = nlohmann::ordered_json::array();
  for (double v : cert.per_degree) {
    per_degree.push_back(std::isfinite(v) ? nlohmann::ordered_json(v)
                                          : nlohmann::ordered_json("inf"));
  }
  jl["per_degree"] = std::move(per_degree);
  nlohmann::ordered_json matching = nlohmann::ordered_json::array();
  for (const auto& edges : cert.matching) {
    nlohmann::ordered_json level = nlohmann::ordered_json::array();
    for (const MatchEdge& e : edges) level.push_back({e.a, e.b});
    matching.push_back(std::move(level));
  }
  jl["matching"] = std::move(matching);
  jl["passes"] = cert.passes;
  jl["diagnostic"] = cert.diagnostic;
  j["interleaving"] = std::move(jl);

  j["timings_ms"] = timer.json();

  if (!config.out_path.empty()) {
    std::ofstream out(config.out_path);
    if (!out) {
      throw ContractViolation("config: cannot write report to '" +
                              config.out_path + "'");
    }
    out << j.dump(2) << "\n";
  }
  if (!config.svg_dir.empty()) {
    write_diagram_svgs(report.diagrams_before, report.diagrams_after,
                       report.beta, config.svg_dir);
  }
  return report;
}

}  // namespace kdph
