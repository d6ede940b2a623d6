#pragma once

// Evaluation-map Jacobians and functional dimension.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fundim/linalg.hpp"
#include "fundim/network.hpp"

namespace fundim {

// Ordered input points; point i owns rows [i*n_m, (i+1)*n_m) of J E_Z.
template <class T>
using Batch = std::vector<std::vector<T>>;

enum class SmoothnessPolicy {
  kStrict,      // only zero-free labels
  kPermissive,  // also SmoothStableDead points; zero labels are treated as off
};

enum class RankBackend { kExact, kNumeric };
enum class BoundKind { kExact, kLowerBound };

std::string_view to_string(RankBackend b);
std::string_view to_string(BoundKind k);

template <class T>
struct RankReport {
  size_t value = 0;
  RankBackend backend = ScalarTraits<T>::kExact ? RankBackend::kExact : RankBackend::kNumeric;
  std::optional<double> tol;  // numeric backend only
  Batch<T> witness;
  std::optional<bool> saturated;  // random_saturation only
  BoundKind bound = BoundKind::kExact;
  std::string strategy;
  std::vector<std::string> notes;
};

// Throws NonSmoothPointError naming every point that fails the policy.
template <class T>
void require_smooth(const Parameter<T>& p, const Batch<T>& z, SmoothnessPolicy policy,
                    double zero_tol = kDefaultZeroTol);

// k*n_m x D matrix of output derivatives with respect to the flat parameter.
template <class T>
Matrix<T> eval_jacobian(const Parameter<T>& p, const Batch<T>& z,
                        SmoothnessPolicy policy = SmoothnessPolicy::kStrict,
                        double zero_tol = kDefaultZeroTol);

// Rows of J E_z for a single point, without the smoothness check. Zero labels
// are treated as off.
template <class T>
Matrix<T> point_jacobian(const Parameter<T>& p, std::span<const T> x,
                         double zero_tol = kDefaultZeroTol);

struct FdJacobian {
  FloatMatrix value;          // central differences
  std::vector<bool> flagged;  // row-major; one-sided quotients disagree
  size_t flagged_count() const;
};

// Central differences in parameter space. An entry is flagged when its
// forward and backward quotients differ by more than flag_tol (relative).
FdJacobian eval_jacobian_fd(const FloatParameter& p, const Batch<double>& z, double h = 1e-6,
                            double flag_tol = 1e-5);

template <class T>
RankReport<T> stochastic_dim(const Parameter<T>& p, const std::vector<T>& z,
                             SmoothnessPolicy policy = SmoothnessPolicy::kStrict,
                             double tol = kDefaultRankTol);

template <class T>
RankReport<T> batch_dim(const Parameter<T>& p, const Batch<T>& z,
                        SmoothnessPolicy policy = SmoothnessPolicy::kStrict,
                        double tol = kDefaultRankTol);

enum class DimStrategy { kDecisive1D, kRandomSaturation };

std::string_view to_string(DimStrategy s);
DimStrategy parse_dim_strategy(std::string_view text);

struct FunctionalDimOptions {
  DimStrategy strategy = DimStrategy::kRandomSaturation;
  std::uint64_t seed = 0;
  size_t max_points = 0;  // 0: 4 * D
  size_t patience = 0;    // 0: D
  bool positive_orthant_only = false;
  SmoothnessPolicy policy = SmoothnessPolicy::kStrict;
  double tol = kDefaultRankTol;
  double zero_tol = kDefaultZeroTol;
  std::int64_t box = 10;  // exact sampling grid half-width
  // Candidate draws allowed per accepted point before giving up.
  size_t attempts_per_point = 64;
};

// Functional dimension. The decisive strategy needs n_0 == 1 and reports an
// exact value when the complex is transversal and generic and every top cell
// contributes; all other results are lower bounds.
template <class T>
RankReport<T> functional_dim(const Parameter<T>& p, const FunctionalDimOptions& opts = {});

// n_m + sum_{i<m} n_i n_{i+1}.
size_t upper_bound(const Architecture& arch);
// n_1 + ... + n_{m-1}; D - upper_bound(arch) is at least this.
size_t bound_gap_lower(const Architecture& arch);

// D of the architecture with the neurons that are off at z removed.
template <class T>
size_t off_neuron_bound(const Parameter<T>& p, std::span<const T> z,
                        double zero_tol = kDefaultZeroTol);

}  // namespace fundim
