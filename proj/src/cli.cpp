#include "permorb/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "permorb/audit.hpp"
#include "permorb/constructions.hpp"
#include "permorb/embeddings.hpp"
#include "permorb/io.hpp"
#include "permorb/metrics.hpp"
#include "permorb/separation.hpp"

namespace permorb::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::optional<std::uint64_t> budget;
  unsigned threads = 1;
  std::string out;
};

struct Config {
  Common common;
  // construct
  std::string kind;
  std::size_t n = 0, d = 0, D = 0, M = 0, r = 0, m = 0;
  std::string a_path, x_path, y_path, b_path, l_path, tail_path;
  // audit
  std::size_t trials = 1000;
  bool check_ose = false;
  double epsilon = 0.25, eta = 0.1, c = 4.0;
  std::size_t ose_trials = 1000;
  std::uint64_t subset_samples = 0;
  // certify
  std::string checkpoint;
  bool resume = false;
  bool no_reduce = false;
  std::uint64_t checkpoint_interval = 1'000'000;
  // distance
  bool bruteforce = false;
  // reproduce
  std::size_t max_n = 16, max_d = 16;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--tol", c.tol, "Numerical tolerance");
  sub->add_option("--budget", c.budget, "Enumeration budget (default: $PERMORB_BUDGET or 2000000)");
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  sub->add_option("--out", c.out, "Output file or directory");
}

std::uint64_t resolve_budget(const Common& c) {
  if (c.budget) return *c.budget;
  if (const char* env = std::getenv("PERMORB_BUDGET"); env && *env) {
    std::uint64_t v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw InvalidInput("PERMORB_BUDGET must be a non-negative integer, got '" + s + "'");
    }
    return v;
  }
  return kDefaultBudget;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

DirectionSet load_directions(const std::string& path) {
  require(!path.empty(), "--A is required");
  return DirectionSet(read_csv_matrix(path));
}

PointCloud load_cloud(const std::string& path, const char* flag) {
  require(!path.empty(), std::string(flag) + " is required");
  return PointCloud(read_csv_matrix(path));
}

json base_report(const std::string& command, const Config& cfg) {
  json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = cfg.common.seed;
  return j;
}

void emit_json(const json& j, const Config& cfg, std::ostream& out) {
  const std::string text = dump_json(j);
  if (cfg.common.out.empty()) {
    out << text;
  } else {
    write_text_file(cfg.common.out, text);
  }
}

fs::path output_dir(const Config& cfg) {
  require(!cfg.common.out.empty(), "--out DIR is required");
  const fs::path dir(cfg.common.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

json direction_certificate(const DirectionSet& a) {
  json j;
  j["d"] = a.d();
  j["D"] = a.D();
  j["sigma1"] = upper_lipschitz(a);
  return j;
}

int cmd_construct(const Config& cfg, std::ostream& out) {
  const RngSeed seed{cfg.common.seed};
  json cert = base_report("construct", cfg);
  cert["kind"] = cfg.kind;
  const fs::path dir = output_dir(cfg);

  auto write_directions = [&](const DirectionSet& a) {
    write_csv_matrix(dir / "A.csv", a.matrix());
    cert.update(direction_certificate(a));
  };
  auto write_pair = [&](const CounterexamplePair& p) {
    write_csv_matrix(dir / "X.csv", p.x.data());
    write_csv_matrix(dir / "Y.csv", p.y.data());
    cert["certificate"] = p.certificate;
    cert["dist"] = p.certificate.at("dist");
  };

  if (cfg.kind == "gaussian") {
    write_directions(gaussian_directions(cfg.d, cfg.D, seed));
  } else if (cfg.kind == "sphere") {
    write_directions(sphere_directions(cfg.d, cfg.D, seed));
  } else if (cfg.kind == "circle") {
    write_directions(circle_directions(cfg.D));
  } else if (cfg.kind == "identity-augmented") {
    require(!cfg.tail_path.empty(), "identity-augmented needs --tail");
    write_directions(identity_augmented(read_csv_matrix(cfg.tail_path)));
  } else if (cfg.kind == "matousek-pair") {
    write_pair(matousek_counterexample(load_directions(cfg.a_path), seed));
  } else if (cfg.kind == "adversarial-pair") {
    write_pair(adversarial_circle_pair(cfg.n, cfg.d));
  } else {
    throw InvalidInput("unknown construction '" + cfg.kind +
                       "' (gaussian, sphere, circle, identity-augmented, matousek-pair, adversarial-pair)");
  }
  write_text_file(dir / "certificate.json", dump_json(cert));
  out << "wrote " << cfg.kind << " to " << dir.string() << "\n";
  return kOk;
}

int cmd_embed(const Config& cfg, std::ostream& out) {
  const DirectionSet a = load_directions(cfg.a_path);
  const PointCloud x = load_cloud(cfg.x_path, "--X");
  const EmbeddingKind kind = parse_embedding_kind(cfg.kind.empty() ? "beta" : cfg.kind);
  Matrix result;
  if (kind == EmbeddingKind::beta) {
    result = beta(a, x).matrix();
  } else if (kind == EmbeddingKind::delta) {
    require(!cfg.b_path.empty(), "delta needs --B");
    result = delta(a, RowProjector(read_csv_matrix(cfg.b_path)), x).transpose();
  } else {
    require(!cfg.l_path.empty(), "sketch needs --L");
    result = beta_sketch(a, SketchOperator(read_csv_matrix(cfg.l_path)), x).transpose();
  }
  if (cfg.common.out.empty()) {
    out << format_csv_matrix(result);
  } else {
    write_csv_matrix(cfg.common.out, result);
  }
  return kOk;
}

int cmd_distance(const Config& cfg, std::ostream& out) {
  const PointCloud x = load_cloud(cfg.x_path, "--X");
  const PointCloud y = load_cloud(cfg.y_path, "--Y");
  json j = base_report("distance", cfg);
  const auto res = cfg.bruteforce ? orbit_distance_bruteforce(x, y) : orbit_distance(x, y);
  j["method"] = cfg.bruteforce ? "bruteforce" : "hungarian";
  j["distance"] = res.distance;
  j["wasserstein2"] = res.distance / std::sqrt(static_cast<double>(x.n()));
  j["sigma"] = res.sigma.map();
  if (!cfg.a_path.empty()) {
    const DirectionSet a = load_directions(cfg.a_path);
    j["embedding_gap"] = embedding_gap(a, x, y);
    const auto sw = sliced_w2_sampled(x, y, a);
    j["sliced_w2"] = sw.value;
    j["non_unit_directions"] = sw.non_unit_directions;
  }
  emit_json(j, cfg, out);
  return kOk;
}

int cmd_audit(const Config& cfg, std::ostream& out) {
  const DirectionSet a = load_directions(cfg.a_path);
  require(cfg.n >= 1, "--n is required");
  const RngSeed seed{cfg.common.seed};
  DistortionOptions opt;
  opt.budget = resolve_budget(cfg.common);
  opt.threads = cfg.common.threads;
  if (cfg.r > 0 && cfg.subset_samples == 0) opt.r = cfg.r;
  if (cfg.m > 0) opt.m = cfg.m;
  const AuditReport rep = empirical_distortion(a, cfg.n, cfg.trials, seed, opt);

  json j = base_report("audit", cfg);
  j["n"] = rep.n;
  j["d"] = a.d();
  j["D"] = a.D();
  j["trials"] = rep.trials;
  j["pair_count"] = rep.pair_count;
  j["sigma1"] = rep.sigma1;
  j["empirical_C1"] = rep.empirical_C1;
  j["empirical_C2"] = rep.empirical_C2;
  j["distortion"] = rep.distortion();
  if (a.d() >= 2) {
    j["ceiling_sqrt_n"] = {{"value", rep.ceiling.value}, {"a_independent", rep.ceiling.a_independent}};
  } else {
    j["ceiling_sqrt_n"] = nullptr;
  }

  std::optional<SubsetBound> subset = rep.subset_bound;
  if (cfg.r > 0 && cfg.subset_samples > 0) {
    subset = subset_sigma_sampled(a, cfg.r, cfg.subset_samples, RngSeed{derive_seed(seed.value, 1ull << 63)});
  }
  if (subset) {
    const std::size_t min_d = subset_bound_min_D(cfg.n, a.d(), subset->r);
    j["subset_bound"] = {{"value", subset->value},
                         {"r", subset->r},
                         {"subset_count", subset->subset_count},
                         {"certified", subset->certified},
                         {"hypothesis_min_D", min_d},
                         {"hypothesis_holds", a.D() >= min_d}};
  } else {
    j["subset_bound"] = nullptr;
  }
  if (rep.pu) {
    j["projective_uniformity"] = {{"m", rep.pu->m},
                                  {"delta", rep.pu->delta},
                                  {"method", to_string(rep.pu->method)},
                                  {"direction_count", rep.pu->direction_count}};
  } else {
    j["projective_uniformity"] = nullptr;
  }
  j["blueprint_bound"] = rep.blueprint_bound ? json(*rep.blueprint_bound) : json(nullptr);

  if (cfg.check_ose) {
    const std::size_t M = cfg.M > 0 ? cfg.M : ose_dimension(cfg.n, a.d(), a.D(), cfg.epsilon, cfg.eta, cfg.c);
    const SketchOperator l = gaussian_sketch(cfg.n, a.D(), M, RngSeed{derive_seed(seed.value, 2ull << 62)});
    const OseReport ose = ose_check(a, l, cfg.n, cfg.epsilon, cfg.ose_trials, RngSeed{derive_seed(seed.value, 3ull << 62)});
    j["ose_check"] = {{"M", M},
                      {"epsilon", cfg.epsilon},
                      {"eta", cfg.eta},
                      {"c", cfg.c},
                      {"trials", cfg.ose_trials},
                      {"evaluated", ose.evaluated},
                      {"skipped_pairs", ose.skipped},
                      {"violations", ose.violations},
                      {"max_ratio_error", ose.max_ratio_error},
                      {"region_count_bound", region_count_bound(cfg.n, a.d(), a.D()).str()}};
  }

  json skipped = json::object();
  for (const auto& [name, reason] : rep.skipped) skipped[name] = reason;
  j["skipped"] = skipped;
  emit_json(j, cfg, out);
  const bool budget_hit = skipped.contains("subset_bound");
  return budget_hit ? kBudgetExceeded : kOk;
}

int cmd_certify(const Config& cfg, std::ostream& out) {
  const DirectionSet a = load_directions(cfg.a_path);
  require(cfg.n >= 1, "--n is required");
  CertifyOptions opt;
  opt.budget = resolve_budget(cfg.common);
  opt.threads = cfg.common.threads;
  opt.seed = RngSeed{cfg.common.seed};
  opt.reduce_coset = !cfg.no_reduce;
  opt.checkpoint_interval = cfg.checkpoint_interval;
  if (!cfg.checkpoint.empty()) opt.checkpoint_path = fs::path(cfg.checkpoint);
  opt.resume = cfg.resume;
  const SeparationVerdict v = certify_separation(a, cfg.n, opt);
  json j = base_report("certify", cfg);
  j["n"] = cfg.n;
  j["d"] = a.d();
  j["D"] = a.D();
  j["reduce_coset"] = opt.reduce_coset;
  j["verdict"] = verdict_to_json(v);
  if (v.witness) j["verdict"]["witness"]["verified"] = verify_witness(a, *v.witness, cfg.common.tol);
  emit_json(j, cfg, out);
  switch (v.status) {
    case SeparationStatus::separating:
      return kOk;
    case SeparationStatus::witness_found:
      return kWitnessFound;
    default:
      return kInconclusive;
  }
}

int cmd_counterexample(const Config& cfg, std::ostream& out) {
  const fs::path dir = output_dir(cfg);
  const RngSeed seed{cfg.common.seed};
  std::optional<DirectionSet> a;
  if (!cfg.a_path.empty()) {
    a = load_directions(cfg.a_path);
  } else {
    require(cfg.d >= 2 && cfg.D >= 1, "give --A, or --d >= 2 and --D for a Gaussian A");
    a = gaussian_directions(cfg.d, cfg.D, RngSeed{derive_seed(seed.value, 0)});
    write_csv_matrix(dir / "A.csv", a->matrix());
  }
  const CounterexamplePair p = matousek_counterexample(*a, RngSeed{derive_seed(seed.value, 1)});
  write_csv_matrix(dir / "X.csv", p.x.data());
  write_csv_matrix(dir / "Y.csv", p.y.data());
  json j = base_report("counterexample", cfg);
  j["n"] = p.x.n();
  j["d"] = a->d();
  j["D"] = a->D();
  j["dist"] = orbit_distance(p.x, p.y).distance;
  j["embedding_gap"] = embedding_gap(*a, p.x, p.y);
  j["certificate"] = p.certificate;
  write_text_file(dir / "certificate.json", dump_json(j));
  out << "wrote counterexample with n = " << p.x.n() << " to " << dir.string() << "\n";
  return kOk;
}

std::string table_csv(std::size_t max_n, std::size_t max_d, const std::function<long(std::size_t, std::size_t)>& f) {
  std::ostringstream s;
  s << "n\\d";
  for (std::size_t d = 2; d <= max_d; ++d) s << ',' << d;
  s << '\n';
  for (std::size_t n = 2; n <= max_n; ++n) {
    s << n;
    for (std::size_t d = 2; d <= max_d; ++d) s << ',' << f(n, d);
    s << '\n';
  }
  return s.str();
}

long minimal_nD(std::size_t n, std::size_t d) { return static_cast<long>(n * min_injective_D_upper(n, d)); }
long maximal_nD(std::size_t n, std::size_t d) { return static_cast<long>(n * non_injective_D_threshold(n, d)); }

int cmd_reproduce(const Config& cfg, std::ostream& out) {
  require(cfg.max_n >= 6 && cfg.max_n <= 16 && cfg.max_d >= 6 && cfg.max_d <= 16,
          "--max-n and --max-d must lie in [6, 16]");
  const std::size_t mn = cfg.max_n, md = cfg.max_d;
  const std::string minimal = table_csv(mn, md, minimal_nD);
  const std::string maximal = table_csv(mn, md, maximal_nD);

  std::ostringstream inj;
  inj << "n,d,beta_upper_nD,beta_ruled_out_nD,delta_upper_D,sketch_upper_M,delta_sketch_lower\n";
  std::ostringstream gaps;
  gaps << "n,d,D_ruled_out_max,D_guaranteed_min,undecided_D_count\n";
  for (std::size_t n = 2; n <= mn; ++n) {
    for (std::size_t d = 2; d <= md; ++d) {
      const std::size_t up = min_injective_D_upper(n, d);
      const std::size_t lo = non_injective_D_threshold(n, d);
      inj << n << ',' << d << ',' << n * n * (d - 1) + n << ',' << n * lo << ',' << (2 * n - 1) * d << ','
          << (2 * n - 1) * d << ',' << n * d << '\n';
      gaps << n << ',' << d << ',' << lo << ',' << up << ',' << up - lo - 1 << '\n';
    }
  }

  if (!cfg.common.out.empty()) {
    const fs::path dir = output_dir(cfg);
    write_text_file(dir / "minimal.csv", minimal);
    write_text_file(dir / "maximal.csv", maximal);
    write_text_file(dir / "injectivity.csv", inj.str());
    write_text_file(dir / "gaps.csv", gaps.str());
  }

  out << "# minimal nD guaranteeing separation (full spark A)\n" << minimal;
  out << "# maximal nD ruling out separation for every A\n" << maximal;
  const auto mismatches = compare_tables(reference_minimal_table(), reference_maximal_table());
  if (!mismatches.empty()) {
    for (const auto& m : mismatches) {
      out << "MISMATCH " << m.table << " n=" << m.n << " d=" << m.d << " expected " << m.expected << " got "
          << m.actual << '\n';
    }
    return kReproduceMismatch;
  }
  out << "reference tables reproduced: 50 cells match\n";
  return kOk;
}

}  // namespace

const Table5& reference_minimal_table() {
  static const Table5 t{{{6, 10, 14, 18, 22},
                         {12, 21, 30, 39, 48},
                         {20, 36, 52, 68, 84},
                         {30, 55, 80, 105, 130},
                         {42, 78, 114, 150, 186}}};
  return t;
}

const Table5& reference_maximal_table() {
  static const Table5 t{{{4, 8, 12, 16, 20},
                         {6, 12, 18, 24, 30},
                         {12, 24, 36, 48, 60},
                         {15, 30, 45, 60, 75},
                         {18, 36, 54, 72, 90}}};
  return t;
}

std::vector<CellMismatch> compare_tables(const Table5& minimal, const Table5& maximal) {
  std::vector<CellMismatch> out;
  for (int n = 2; n <= 6; ++n) {
    for (int d = 2; d <= 6; ++d) {
      const long mn = minimal_nD(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
      const long mx = maximal_nD(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
      if (mn != minimal[n - 2][d - 2]) out.push_back({"minimal", n, d, minimal[n - 2][d - 2], mn});
      if (mx != maximal[n - 2][d - 2]) out.push_back({"maximal", n, d, maximal[n - 2][d - 2], mx});
    }
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sorting-based permutation-invariant embeddings of point clouds", "permorb"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Config cfg;

  auto* construct = app.add_subcommand("construct", "Generate direction matrices or point-cloud pairs");
  construct->add_option("kind", cfg.kind,
                        "gaussian | sphere | circle | identity-augmented | matousek-pair | adversarial-pair")
      ->required();
  construct->add_option("--n", cfg.n, "Points per cloud");
  construct->add_option("--d", cfg.d, "Ambient dimension");
  construct->add_option("--D", cfg.D, "Number of directions");
  construct->add_option("--A", cfg.a_path, "Direction matrix CSV (matousek-pair)");
  construct->add_option("--tail", cfg.tail_path, "Tail CSV (identity-augmented)");
  add_common(construct, cfg.common);

  auto* embed = app.add_subcommand("embed", "Evaluate beta, delta or sketch on a point cloud");
  embed->add_option("--A", cfg.a_path, "Direction matrix CSV")->required();
  embed->add_option("--X", cfg.x_path, "Point cloud CSV (n x d)")->required();
  embed->add_option("--kind", cfg.kind, "beta | delta | sketch");
  embed->add_option("--B", cfg.b_path, "Row projector CSV (n x D) for delta");
  embed->add_option("--L", cfg.l_path, "Sketch CSV (M x nD) for sketch");
  add_common(embed, cfg.common);

  auto* distance = app.add_subcommand("distance", "Orbit distance between two point clouds");
  distance->add_option("--X", cfg.x_path)->required();
  distance->add_option("--Y", cfg.y_path)->required();
  distance->add_option("--A", cfg.a_path, "Also report the embedding gap and sliced W2 over A");
  distance->add_flag("--bruteforce", cfg.bruteforce, "Enumerate all n! matchings (n <= 9)");
  add_common(distance, cfg.common);

  auto* audit = app.add_subcommand("audit", "Lipschitz and distortion report for a direction matrix");
  audit->add_option("--A", cfg.a_path)->required();
  audit->add_option("--n", cfg.n)->required();
  audit->add_option("--trials", cfg.trials, "Random pairs");
  audit->add_option("--r", cfg.r, "Subset bound parameter");
  audit->add_option("--subset-samples", cfg.subset_samples, "Use a sampled, non-certified subset bound");
  audit->add_option("--m", cfg.m, "Projective uniformity index");
  audit->add_flag("--check-ose", cfg.check_ose, "Add a sketch (OSE) check");
  audit->add_option("--M", cfg.M, "Sketch rows (default from --epsilon/--eta/--c)");
  audit->add_option("--epsilon", cfg.epsilon);
  audit->add_option("--eta", cfg.eta);
  audit->add_option("--c", cfg.c);
  audit->add_option("--ose-trials", cfg.ose_trials);
  add_common(audit, cfg.common);

  auto* certify = app.add_subcommand("certify", "Decide orbit separation for A = (I | tail)");
  certify->add_option("--A", cfg.a_path)->required();
  certify->add_option("--n", cfg.n)->required();
  certify->add_option("--checkpoint", cfg.checkpoint, "Checkpoint JSON path");
  certify->add_option("--checkpoint-interval", cfg.checkpoint_interval);
  certify->add_flag("--resume", cfg.resume, "Continue from --checkpoint");
  certify->add_flag("--no-coset-reduction", cfg.no_reduce, "Enumerate P_1 as well");
  add_common(certify, cfg.common);

  auto* counter = app.add_subcommand("counterexample", "Build a colliding pair for a direction matrix");
  counter->add_option("--A", cfg.a_path);
  counter->add_option("--d", cfg.d);
  counter->add_option("--D", cfg.D);
  add_common(counter, cfg.common);

  auto* reproduce = app.add_subcommand("reproduce", "Regenerate the dimension tables");
  reproduce->add_option("--max-n", cfg.max_n);
  reproduce->add_option("--max-d", cfg.max_d);
  add_common(reproduce, cfg.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*construct) return cmd_construct(cfg, out);
    if (*embed) return cmd_embed(cfg, out);
    if (*distance) return cmd_distance(cfg, out);
    if (*audit) return cmd_audit(cfg, out);
    if (*certify) return cmd_certify(cfg, out);
    if (*counter) return cmd_counterexample(cfg, out);
    if (*reproduce) return cmd_reproduce(cfg, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kBudgetExceeded;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace permorb::cli
