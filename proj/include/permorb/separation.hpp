#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "permorb/constructions.hpp"
#include "permorb/core.hpp"
#include "permorb/embeddings.hpp"
#include "permorb/rng.hpp"

namespace permorb {

// Certification works with X in R^{d x n}: row i of X is x_i, the i-th
// coordinate of all n points. The point cloud is X^T.

struct SeparationWitness {
  /// d permutations; P_tuple[0] is the identity when the coset reduction is on.
  std::vector<Permutation> p_tuple;
  /// D - d permutations, one per tail column.
  std::vector<Permutation> q_tuple;
  /// d x n, normalized to unit Frobenius norm.
  Matrix x;
  std::uint64_t index = 0;
};

enum class SeparationStatus { separating, witness_found, inconclusive };

std::string to_string(SeparationStatus status);

struct SeparationVerdict {
  SeparationStatus status = SeparationStatus::inconclusive;
  std::optional<SeparationWitness> witness;
  /// Tuples covered so far (pruned subtrees count in full), including work
  /// done by earlier invocations when resuming.
  std::uint64_t tuples_examined = 0;
  std::uint64_t total_tuples = 0;
  std::uint64_t budget = 0;
  /// Where an inconclusive run would continue.
  std::uint64_t next_index = 0;
};

struct CertifyOptions {
  /// Maximum tuples covered by one invocation.
  std::uint64_t budget = kDefaultBudget;
  unsigned threads = 1;
  RngSeed seed{0};
  /// Fix P_1 = identity. Off enumerates the full tuple space.
  bool reduce_coset = true;
  std::optional<std::filesystem::path> checkpoint_path;
  std::uint64_t checkpoint_interval = 1'000'000;
  /// Continue from checkpoint_path if it exists.
  bool resume = false;
};

inline constexpr std::size_t kCertifyMaxRows = 6;

/// Decides orbit separation of beta_A for A = (I_d | tail) by enumerating
/// permutation tuples in lexicographic order. Throws UnsupportedForm if the
/// first d columns of A are not the identity, InvalidInput for n > 6.
SeparationVerdict certify_separation(const DirectionSet& a, std::size_t n, const CertifyOptions& options = {});

/// True iff the witness satisfies both conditions: the linear condition with
/// residual <= tol ||X||_F ||A||_F, and no single P in S_n agrees with
/// every P_i on x_i (up to tol ||X||_F).
bool verify_witness(const DirectionSet& a, const SeparationWitness& w, double tol = 1e-8);

/// Point clouds X^T and Y^T with y_i = P_i x_i; beta_A agrees on them.
CounterexamplePair witness_pair(const SeparationWitness& w);

nlohmann::json verdict_to_json(const SeparationVerdict& v);

/// n (d - 1) + 1: full-spark A with at least this many columns separates orbits.
std::size_t min_injective_D_upper(std::size_t n, std::size_t d);

/// Largest D for which the subset-sum construction yields a collision:
/// (d - 1) * (floor(log2 n) + 1).
std::size_t non_injective_D_threshold(std::size_t n, std::size_t d);

enum class EmbeddingKind { beta, delta, sketch };

std::string to_string(EmbeddingKind kind);
EmbeddingKind parse_embedding_kind(const std::string& s);

struct EmbeddingUnderTest {
  EmbeddingKind kind = EmbeddingKind::beta;
  DirectionSet a;
  std::optional<RowProjector> b;
  std::optional<SketchOperator> l;

  Vector apply(const PointCloud& x) const;
  /// ||A||_F times the norm of B or L, used to scale tolerances.
  double operator_scale() const;
};

/// Gaussian A (d x D) and, by kind, Gaussian B (n x D) or a Gaussian sketch L
/// with M rows.
EmbeddingUnderTest random_embedding(EmbeddingKind kind, std::size_t n, std::size_t d, std::size_t D,
                                    std::size_t M, RngSeed seed);

struct InjectivityReport {
  /// Pairs at orbit distance >= 0.1 whose embeddings differ by <= 1e-8.
  std::size_t collisions = 0;
  /// Same-orbit pairs whose embeddings differ by more than 1e-9 * scale.
  std::size_t false_separations = 0;
  std::size_t pairs_tested = 0;
  std::size_t same_orbit_tested = 0;
};

/// Random pairs plus the `injected` ones (which count towards collisions
/// like any other pair). Throws InvalidInput for delta with D < (2n - 1) d.
InjectivityReport spot_check_injectivity(const EmbeddingUnderTest& emb, std::size_t n, std::size_t trials,
                                         RngSeed seed, const std::vector<CounterexamplePair>& injected = {});

}  // namespace permorb
