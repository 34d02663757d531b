#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "permorb/core.hpp"
#include "permorb/embeddings.hpp"
#include "permorb/rng.hpp"

namespace permorb {

/// sigma_1(A), the exact upper Lipschitz constant of beta_A.
double upper_lipschitz(const DirectionSet& a);

struct SubsetBound {
  double value = 0.0;
  std::size_t r = 0;
  /// Subsets evaluated (all C(D, rd) when certified).
  std::uint64_t subset_count = 0;
  /// False for the sampled variant, whose value only over-estimates the min.
  bool certified = true;
};

/// Exact min over |I| = r*d of sigma_d(A(I)). Throws BudgetExceeded when
/// C(D, rd) exceeds the budget; use the sampled variant then.
SubsetBound subset_sigma_lower_bound(const DirectionSet& a, std::size_t r, std::uint64_t budget = kDefaultBudget);

/// Minimum over `samples` random subsets of size r*d. Not a certified bound.
SubsetBound subset_sigma_sampled(const DirectionSet& a, std::size_t r, std::uint64_t samples, RngSeed seed);

/// Smallest hypothesis dimension for the subset bound: r d ((n-1)^2 + 1).
std::size_t subset_bound_min_D(std::size_t n, std::size_t d, std::size_t r);

enum class PUMethod { exact_2d_sweep, sphere_sampling };

struct PUEstimate {
  std::size_t m = 1;
  double delta = 0.0;
  PUMethod method = PUMethod::exact_2d_sweep;
  std::size_t direction_count = 0;
};

std::string to_string(PUMethod method);

/// m-th smallest |a_k . e|, minimised over directions e. exact_2d_sweep needs
/// d = 2 and scans 256 D grid angles on [0, pi) together with the angles
/// perpendicular to each column. sphere_sampling uses `samples` seeded
/// uniform directions (0 means 10^4 d) and can only over-estimate delta.
PUEstimate projective_uniformity(const DirectionSet& a, std::size_t m, PUMethod method, RngSeed seed = {},
                                 std::size_t samples = 0);

/// delta * sqrt(D - n^2 (m - 1)). Throws Inapplicable if n^2 (m - 1) > D.
double blueprint_lower_bound(double delta, std::size_t m, std::size_t D, std::size_t n);

struct SqrtnCeiling {
  /// Uses the two smallest singular values of A.
  double value = 0.0;
  /// Uses the two largest singular values; valid against the adversarial pair.
  double a_independent = 0.0;
};

/// (2 + 1/n)^(1/2) pi n^(-1/2) (s^2 + t^2)^(1/2) for the two singular value
/// choices above. Throws InvalidInput for d < 2.
SqrtnCeiling sqrtn_ceiling(const DirectionSet& a, std::size_t n);

struct DistortionOptions {
  /// Subset bound parameter; skipped when unset.
  std::optional<std::size_t> r;
  /// Projective uniformity index; skipped when unset. The blueprint bound is
  /// only reported when delta comes from the exact sweep.
  std::optional<std::size_t> m;
  std::uint64_t budget = kDefaultBudget;
  unsigned threads = 1;
  bool include_adversarial = true;
};

struct AuditReport {
  std::size_t n = 0;
  double sigma1 = 0.0;
  std::optional<SubsetBound> subset_bound;
  std::optional<PUEstimate> pu;
  std::optional<double> blueprint_bound;
  double empirical_C1 = 0.0;
  double empirical_C2 = 0.0;
  SqrtnCeiling ceiling;
  RngSeed seed;
  std::size_t trials = 0;
  /// Pairs that entered the min/max (after the dist >= 1e-8 filter).
  std::size_t pair_count = 0;
  /// Parts of the report that could not be computed, with the reason.
  std::vector<std::pair<std::string, std::string>> skipped;

  double distortion() const { return empirical_C2 / empirical_C1; }
};

inline constexpr std::size_t kEmpiricalMaxRows = 8;

/// Samples `trials` pairs (independent Gaussian clouds, near-orbit pairs and
/// one-row perturbations at log-uniform scales 1e-2..1e2) plus the
/// adversarial circle pair, and records the min and max of
/// ||beta(A,X) - beta(A,Y)||_F / dist(X,Y). Results do not depend on the
/// thread count.
AuditReport empirical_distortion(const DirectionSet& a, std::size_t n, std::size_t trials, RngSeed seed,
                                 const DistortionOptions& options = {});

/// ceil(c eps^-2 (2nd ln(1/eps) + ln(1/eta) + 2nd ln(D n^2))).
std::size_t ose_dimension(std::size_t n, std::size_t d, std::size_t D, double epsilon, double eta, double c = 4.0);

/// M x nD matrix with i.i.d. N(0, 1/M) entries (standard deviation 1/sqrt(M)).
SketchOperator gaussian_sketch(std::size_t n, std::size_t D, std::size_t M, RngSeed seed);

struct OseReport {
  std::size_t violations = 0;
  double max_ratio_error = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

/// For random Gaussian pairs, rho = ||L (vec beta(X) - vec beta(Y))|| /
/// ||beta(X) - beta(Y)||_F; counts rho outside [1 - eps, 1 + eps].
OseReport ose_check(const DirectionSet& a, const SketchOperator& l, std::size_t n, double epsilon,
                    std::size_t trials, RngSeed seed);

/// (D n^2)^(2nd) as an exact integer.
boost::multiprecision::cpp_int region_count_bound(std::size_t n, std::size_t d, std::size_t D);

}  // namespace permorb
