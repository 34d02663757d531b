#include "permorb/separation.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "permorb/audit.hpp"
#include "permorb/io.hpp"
#include "permorb/metrics.hpp"
#include "permorb/parallel.hpp"

namespace permorb {

namespace {

constexpr std::size_t kWitnessSamples = 8;
constexpr double kWitnessTol = 1e-8;

// Orthonormal basis of the complement of the all-ones vector (Helmert).
// Constant rows x_i = c 1 solve the linear condition for every tuple and
// never witness anything, so the unknowns are x_i = U z_i.
Matrix helmert_basis(std::size_t n) {
  const auto nn = static_cast<Eigen::Index>(n);
  Matrix u = Matrix::Zero(nn, nn - 1);
  for (Eigen::Index k = 1; k < nn; ++k) {
    const double kd = static_cast<double>(k);
    const double c = 1.0 / std::sqrt(kd * (kd + 1.0));
    for (Eigen::Index r = 0; r < k; ++r) u(r, k - 1) = c;
    u(k, k - 1) = -kd * c;
  }
  return u;
}

// (P v)_r = v_{p[r]}.
Vector apply_perm(const Permutation& p, const Eigen::Ref<const Vector>& v) {
  Vector out(v.size());
  for (Eigen::Index r = 0; r < v.size(); ++r) out(r) = v(static_cast<Eigen::Index>(p[static_cast<std::size_t>(r)]));
  return out;
}

Matrix perm_matrix(const Permutation& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) m(r, static_cast<Eigen::Index>(p[static_cast<std::size_t>(r)])) = 1.0;
  return m;
}

std::uint64_t checked_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base) {
      throw InvalidInput("permutation tuple space exceeds 2^64 entries");
    }
    out *= base;
  }
  return out;
}

void require_identity_augmented(const DirectionSet& a) {
  const Matrix& m = a.matrix();
  const auto d = m.rows();
  if (m.cols() < d || m.leftCols(d) != Matrix::Identity(d, d)) {
    throw UnsupportedForm("certification needs A = (I_d | tail); the first d columns are not the identity");
  }
}

// True iff no P in S_n has P x_i = P_i x_i for every i (each up to tol in norm).
bool second_condition(const Matrix& x, const std::vector<Permutation>& p_tuple,
                      const std::vector<Permutation>& perms, double tol) {
  const auto d = x.rows();
  const auto n = x.cols();
  Matrix y(d, n);
  for (Eigen::Index i = 0; i < d; ++i) y.row(i) = apply_perm(p_tuple[static_cast<std::size_t>(i)], x.row(i).transpose()).transpose();
  for (const auto& p : perms) {
    bool all_match = true;
    for (Eigen::Index i = 0; i < d && all_match; ++i) {
      // Cheap entrywise rejection first; a norm within tol needs every entry within tol.
      double sq = 0.0;
      for (Eigen::Index r = 0; r < n; ++r) {
        const double diff = x(i, static_cast<Eigen::Index>(p[static_cast<std::size_t>(r)])) - y(i, r);
        if (std::abs(diff) > tol) {
          all_match = false;
          break;
        }
        sq += diff * diff;
      }
      if (all_match) all_match = std::sqrt(sq) <= tol;
    }
    if (all_match) return false;
  }
  return true;
}

struct Problem {
  std::size_t n = 0, d = 0, tails = 0, m1 = 0, cols = 0;
  std::size_t levels = 0, p_levels = 0;
  bool reduce = true;
  std::uint64_t nf = 0;
  Matrix tail;
  Matrix u;
  std::vector<Permutation> perms;
  std::vector<Matrix> reduced;  // U^T P U for each permutation
  std::vector<std::uint64_t> child_size;
  double rank_tol = 0.0;
  std::uint64_t seed = 0;
};

Problem make_problem(const DirectionSet& a, std::size_t n, const CertifyOptions& options) {
  Problem pr;
  pr.n = n;
  pr.d = a.d();
  pr.tails = a.D() - a.d();
  pr.m1 = n - 1;
  pr.cols = pr.d * pr.m1;
  pr.reduce = options.reduce_coset;
  pr.p_levels = pr.reduce ? pr.d - 1 : pr.d;
  pr.levels = pr.p_levels + pr.tails;
  pr.nf = factorial(n);
  pr.tail = a.matrix().rightCols(static_cast<Eigen::Index>(pr.tails));
  pr.u = helmert_basis(n);
  pr.perms = all_permutations(n);
  for (const auto& p : pr.perms) pr.reduced.push_back(pr.u.transpose() * perm_matrix(p) * pr.u);
  pr.child_size.resize(pr.levels);
  for (std::size_t l = 0; l < pr.levels; ++l) pr.child_size[l] = checked_pow(pr.nf, pr.levels - l - 1);
  // Each block row j maps z to sum_i a_j[i] (P_i - Q_j) U z_i, whose norm is
  // at most 2 (sum_i |a_j[i]|) ||z||; summing squares bounds sigma_1 of every
  // stacked system, so one absolute threshold serves all depths.
  double s = 0.0;
  for (Eigen::Index j = 0; j < pr.tail.cols(); ++j) {
    const double cs = pr.tail.col(j).cwiseAbs().sum();
    s += cs * cs;
  }
  pr.rank_tol = 1e-10 * std::max(2.0 * std::sqrt(s), 1e-300);
  pr.seed = options.seed.value;
  return pr;
}

class Search {
 public:
  Search(const Problem& pr, std::uint64_t lo, std::uint64_t hi)
      : pr_(pr), lo_(lo), hi_(hi), choice_(pr.levels, 0), nulls_(pr.tails + 1) {
    const auto cols = static_cast<Eigen::Index>(pr.cols);
    nulls_[0] = Matrix::Identity(cols, cols);
  }

  std::optional<SeparationWitness> run() {
    visit(0, 0);
    return std::move(witness_);
  }

 private:
  std::size_t p_of(std::size_t i) const {
    if (pr_.reduce) return i == 0 ? 0 : choice_[i - 1];
    return choice_[i];
  }

  // Restricts the null space of the first j block rows by block row j:
  // nulls_[j + 1] = nulls_[j] * null(M_j nulls_[j]). Returns false when it
  // becomes trivial; adding rows only shrinks it, so the subtree is done.
  bool restrict_null_space(std::size_t j) {
    const auto m1 = static_cast<Eigen::Index>(pr_.m1);
    const Matrix& prev = nulls_[j];
    const Matrix& q = pr_.reduced[choice_[pr_.p_levels + j]];
    Matrix b = Matrix::Zero(m1, prev.cols());
    for (std::size_t i = 0; i < pr_.d; ++i) {
      const double coef = pr_.tail(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (coef == 0.0) continue;
      b.noalias() += coef * (pr_.reduced[p_of(i)] - q) * prev.middleRows(static_cast<Eigen::Index>(i) * m1, m1);
    }
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > pr_.rank_tol) ++rank;
    const Eigen::Index k = prev.cols() - rank;
    if (k == 0) return false;
    nulls_[j + 1] = prev * svd.matrixV().rightCols(k);
    return true;
  }

  void visit(std::size_t level, std::uint64_t base) {
    if (level == pr_.levels) {
      leaf(base);
      return;
    }
    const std::uint64_t child = pr_.child_size[level];
    for (std::size_t p = 0; p < pr_.nf; ++p) {
      const std::uint64_t cb = base + p * child;
      if (cb + child <= lo_) continue;
      if (cb >= hi_) break;
      choice_[level] = p;
      if (level >= pr_.p_levels && !restrict_null_space(level - pr_.p_levels)) continue;
      visit(level + 1, cb);
      if (witness_) return;
    }
  }

  void leaf(std::uint64_t index) {
    const Matrix& basis = nulls_[pr_.tails];
    std::vector<Permutation> p_tuple;
    for (std::size_t i = 0; i < pr_.d; ++i) p_tuple.push_back(pr_.perms[p_of(i)]);
    Rng rng(derive_seed(pr_.seed, index));
    const auto m1 = static_cast<Eigen::Index>(pr_.m1);
    for (std::size_t s = 0; s < kWitnessSamples; ++s) {
      Vector g(basis.cols());
      for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = rng.normal();
      const Vector z = basis * g;
      Matrix x(static_cast<Eigen::Index>(pr_.d), static_cast<Eigen::Index>(pr_.n));
      for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) = (pr_.u * z.segment(i * m1, m1)).transpose();
      const double norm = x.norm();
      if (!(norm > 0.0)) continue;
      x /= norm;
      if (second_condition(x, p_tuple, pr_.perms, kWitnessTol)) {
        SeparationWitness w;
        w.p_tuple = p_tuple;
        for (std::size_t j = 0; j < pr_.tails; ++j) w.q_tuple.push_back(pr_.perms[choice_[pr_.p_levels + j]]);
        w.x = std::move(x);
        w.index = index;
        witness_ = std::move(w);
        return;
      }
    }
  }

  const Problem& pr_;
  std::uint64_t lo_, hi_;
  std::vector<std::size_t> choice_;
  std::vector<Matrix> nulls_;
  std::optional<SeparationWitness> witness_;
};

nlohmann::json perm_json(const Permutation& p) { return p.map(); }

nlohmann::json checkpoint_json(const DirectionSet& a, std::size_t n, const CertifyOptions& options,
                               std::uint64_t next_index, std::uint64_t total) {
  nlohmann::json j;
  j["format"] = "permorb-certify-checkpoint";
  j["version"] = 1;
  j["A"] = matrix_to_json(a.matrix());
  j["n"] = n;
  j["reduce_coset"] = options.reduce_coset;
  j["seed"] = options.seed.value;
  j["next_index"] = next_index;
  j["total_tuples"] = total;
  return j;
}

void write_checkpoint(const std::filesystem::path& path, const nlohmann::json& j) {
  auto tmp = path;
  tmp += ".tmp";
  write_text_file(tmp, dump_json(j));
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
}

std::uint64_t read_checkpoint(const DirectionSet& a, std::size_t n, const CertifyOptions& options,
                              std::uint64_t total) {
  const auto& path = *options.checkpoint_path;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("checkpoint " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    if (j.at("format") != "permorb-certify-checkpoint") throw InvalidInput("unknown checkpoint format");
    if (matrix_from_json(j.at("A")) != a.matrix()) throw InvalidInput("checkpoint was written for a different A");
    if (j.at("n").get<std::size_t>() != n) throw InvalidInput("checkpoint was written for a different n");
    if (j.at("reduce_coset").get<bool>() != options.reduce_coset) {
      throw InvalidInput("checkpoint was written with a different coset setting");
    }
    if (j.at("seed").get<std::uint64_t>() != options.seed.value) {
      throw InvalidInput("checkpoint was written with a different seed");
    }
    const auto next = j.at("next_index").get<std::uint64_t>();
    if (next > total) throw InvalidInput("checkpoint index is past the end of the tuple space");
    return next;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("checkpoint " + path.string() + " is malformed: " + e.what());
  }
}

}  // namespace

std::string to_string(SeparationStatus status) {
  switch (status) {
    case SeparationStatus::separating:
      return "Separating";
    case SeparationStatus::witness_found:
      return "WitnessFound";
    default:
      return "Inconclusive";
  }
}

SeparationVerdict certify_separation(const DirectionSet& a, std::size_t n, const CertifyOptions& options) {
  require_identity_augmented(a);
  if (n < 1 || n > kCertifyMaxRows) {
    throw InvalidInput("certification enumerates S_n and supports 1 <= n <= " + std::to_string(kCertifyMaxRows));
  }
  if (options.checkpoint_interval < 1) throw InvalidInput("checkpoint interval must be positive");
  SeparationVerdict v;
  v.budget = options.budget;
  if (n == 1) {
    v.status = SeparationStatus::separating;
    v.total_tuples = v.tuples_examined = v.next_index = 1;
    return v;
  }

  const Problem pr = make_problem(a, n, options);
  const std::uint64_t total = checked_pow(pr.nf, pr.levels);
  v.total_tuples = total;
  std::uint64_t pos = 0;
  if (options.resume && options.checkpoint_path && std::filesystem::exists(*options.checkpoint_path)) {
    pos = read_checkpoint(a, n, options, total);
  }
  const std::uint64_t end = total - pos > options.budget ? pos + options.budget : total;
  const unsigned threads = std::max(1u, options.threads);

  while (pos < end) {
    const std::uint64_t chunk_end = std::min(end, pos + options.checkpoint_interval);
    std::vector<std::optional<SeparationWitness>> found(threads);
    parallel_ranges(static_cast<std::size_t>(chunk_end - pos), threads,
                    [&](std::size_t w, std::size_t b, std::size_t e) {
                      found[w] = Search(pr, pos + b, pos + e).run();
                    });
    for (auto& f : found) {
      if (f && (!v.witness || f->index < v.witness->index)) v.witness = std::move(f);
    }
    if (v.witness) {
      v.status = SeparationStatus::witness_found;
      v.tuples_examined = v.witness->index + 1;
      v.next_index = v.tuples_examined;
      return v;
    }
    pos = chunk_end;
    if (options.checkpoint_path) write_checkpoint(*options.checkpoint_path, checkpoint_json(a, n, options, pos, total));
  }
  v.tuples_examined = pos;
  v.next_index = pos;
  v.status = pos == total ? SeparationStatus::separating : SeparationStatus::inconclusive;
  return v;
}

bool verify_witness(const DirectionSet& a, const SeparationWitness& w, double tol) {
  const Matrix& x = w.x;
  const auto d = static_cast<std::size_t>(x.rows());
  const auto n = static_cast<std::size_t>(x.cols());
  if (d != a.d() || w.p_tuple.size() != d || w.q_tuple.size() != a.D() - a.d()) return false;
  for (const auto& p : w.p_tuple) {
    if (p.size() != n) return false;
  }
  for (const auto& q : w.q_tuple) {
    if (q.size() != n) return false;
  }
  const double xnorm = x.norm();
  if (!(xnorm > 0.0) || n > kCertifyMaxRows) return false;

  const Matrix& am = a.matrix();
  double residual_sq = 0.0;
  for (std::size_t j = 0; j < w.q_tuple.size(); ++j) {
    Vector r = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < d; ++i) {
      const Vector xi = x.row(static_cast<Eigen::Index>(i)).transpose();
      r += am(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d + j)) *
           (apply_perm(w.p_tuple[i], xi) - apply_perm(w.q_tuple[j], xi));
    }
    residual_sq += r.squaredNorm();
  }
  if (std::sqrt(residual_sq) > tol * xnorm * am.norm()) return false;
  return second_condition(x, w.p_tuple, all_permutations(n), tol * xnorm);
}

CounterexamplePair witness_pair(const SeparationWitness& w) {
  const Matrix& x = w.x;
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    y.row(i) = apply_perm(w.p_tuple[static_cast<std::size_t>(i)], x.row(i).transpose()).transpose();
  }
  nlohmann::json cert;
  cert["construction"] = "separation-witness";
  cert["index"] = w.index;
  return CounterexamplePair(PointCloud(x.transpose()), PointCloud(y.transpose()), std::move(cert));
}

nlohmann::json verdict_to_json(const SeparationVerdict& v) {
  nlohmann::json j;
  j["status"] = to_string(v.status);
  j["tuples_examined"] = v.tuples_examined;
  j["total_tuples"] = v.total_tuples;
  j["budget"] = v.budget;
  j["next_index"] = v.next_index;
  if (v.witness) {
    nlohmann::json w;
    w["index"] = v.witness->index;
    w["P_tuple"] = nlohmann::json::array();
    for (const auto& p : v.witness->p_tuple) w["P_tuple"].push_back(perm_json(p));
    w["Q_tuple"] = nlohmann::json::array();
    for (const auto& q : v.witness->q_tuple) w["Q_tuple"].push_back(perm_json(q));
    w["X"] = matrix_to_json(v.witness->x);
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

std::size_t min_injective_D_upper(std::size_t n, std::size_t d) {
  if (d < 2) throw InvalidInput("min_injective_D_upper needs d >= 2");
  if (n < 1) throw InvalidInput("min_injective_D_upper needs n >= 1");
  if (n == 1) return 1;
  return n * (d - 1) + 1;
}

std::size_t non_injective_D_threshold(std::size_t n, std::size_t d) {
  if (d < 2 || n < 2) throw InvalidInput("non_injective_D_threshold needs n >= 2 and d >= 2");
  return (d - 1) * static_cast<std::size_t>(std::bit_width(n));
}

std::string to_string(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::beta:
      return "beta";
    case EmbeddingKind::delta:
      return "delta";
    default:
      return "sketch";
  }
}

EmbeddingKind parse_embedding_kind(const std::string& s) {
  if (s == "beta") return EmbeddingKind::beta;
  if (s == "delta") return EmbeddingKind::delta;
  if (s == "sketch") return EmbeddingKind::sketch;
  throw InvalidInput("unknown embedding kind '" + s + "' (expected beta, delta or sketch)");
}

Vector EmbeddingUnderTest::apply(const PointCloud& x) const {
  switch (kind) {
    case EmbeddingKind::beta:
      return flatten_embedding(beta(a, x).matrix());
    case EmbeddingKind::delta:
      if (!b) throw InvalidInput("delta embedding needs a row projector B");
      return delta(a, *b, x);
    default:
      if (!l) throw InvalidInput("sketch embedding needs a sketch operator L");
      return beta_sketch(a, *l, x);
  }
}

double EmbeddingUnderTest::operator_scale() const {
  double s = a.matrix().norm();
  if (kind == EmbeddingKind::delta && b) s *= b->matrix().norm();
  if (kind == EmbeddingKind::sketch && l) s *= l->matrix().norm();
  return s;
}

EmbeddingUnderTest random_embedding(EmbeddingKind kind, std::size_t n, std::size_t d, std::size_t D, std::size_t M,
                                    RngSeed seed) {
  EmbeddingUnderTest e{kind, gaussian_directions(d, D, RngSeed{derive_seed(seed.value, 0)}), std::nullopt,
                       std::nullopt};
  if (kind == EmbeddingKind::delta) {
    Rng rng(derive_seed(seed.value, 1));
    Matrix b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(D));
    for (Eigen::Index k = 0; k < b.cols(); ++k) {
      for (Eigen::Index i = 0; i < b.rows(); ++i) b(i, k) = rng.normal();
    }
    e.b = RowProjector(std::move(b));
  } else if (kind == EmbeddingKind::sketch) {
    if (M < 1) throw InvalidInput("sketch embedding needs M >= 1");
    e.l = gaussian_sketch(n, D, M, RngSeed{derive_seed(seed.value, 2)});
  }
  return e;
}

InjectivityReport spot_check_injectivity(const EmbeddingUnderTest& emb, std::size_t n, std::size_t trials,
                                         RngSeed seed, const std::vector<CounterexamplePair>& injected) {
  const std::size_t d = emb.a.d();
  const std::size_t D = emb.a.D();
  if (n < 1) throw InvalidInput("spot check needs n >= 1");
  if (emb.kind == EmbeddingKind::delta && D < (2 * n - 1) * d) {
    throw InvalidInput("delta spot check needs D >= (2n - 1) d = " + std::to_string((2 * n - 1) * d));
  }
  constexpr double kCollision = 1e-8;
  InjectivityReport rep;
  const auto nn = static_cast<Eigen::Index>(n);
  const auto dd = static_cast<Eigen::Index>(d);
  const double op_scale = emb.operator_scale();
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed.value, t));
    auto draw = [&] {
      Matrix m(nn, dd);
      for (Eigen::Index j = 0; j < dd; ++j) {
        for (Eigen::Index i = 0; i < nn; ++i) m(i, j) = rng.normal();
      }
      return PointCloud(std::move(m));
    };
    const PointCloud x = draw();
    if (n >= 2) {
      PointCloud y = draw();
      while (orbit_distance(x, y).distance < 0.1) y = draw();
      if ((emb.apply(x) - emb.apply(y)).norm() <= kCollision) ++rep.collisions;
      ++rep.pairs_tested;
    }
    std::vector<std::size_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(sigma[i - 1], sigma[rng.below(i)]);
    const PointCloud xs = permute_rows(x, Permutation(std::move(sigma)));
    if ((emb.apply(x) - emb.apply(xs)).norm() > 1e-9 * x.data().norm() * op_scale) ++rep.false_separations;
    ++rep.same_orbit_tested;
  }
  for (const auto& pair : injected) {
    if ((emb.apply(pair.x) - emb.apply(pair.y)).norm() <= kCollision) ++rep.collisions;
    ++rep.pairs_tested;
  }
  return rep;
}

}  // namespace permorb
