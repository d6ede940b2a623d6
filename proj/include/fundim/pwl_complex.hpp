#pragma once

// Canonical polyhedral complex of a network with one input, sampled activation
// regions for larger inputs, decisive sets, the slopes-and-values map and
// wall recovery.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fundim/funcdim.hpp"
#include "fundim/network.hpp"

namespace fundim {

// slope * x + intercept on a 1-D cell.
template <class T>
struct Affine1D {
  T slope{0};
  T intercept{0};

  T at(const T& x) const { return slope * x + intercept; }
  friend bool operator==(const Affine1D&, const Affine1D&) = default;
};

template <class T>
struct Cell1D {
  std::optional<T> lo;  // nullopt: unbounded
  std::optional<T> hi;
  TernaryLabel label;
  std::vector<std::vector<Affine1D<T>>> pre;  // pre[l][i]: pre-activation on the cell
  std::vector<Affine1D<T>> output;            // one per output coordinate

  bool contains_interior(const T& x) const {
    return (!lo || *lo < x) && (!hi || x < *hi);
  }
};

template <class T>
struct Complex1D {
  std::vector<T> breakpoints;  // strictly increasing
  std::vector<Cell1D<T>> cells;  // cells[i] lies between breakpoints i-1 and i
  std::vector<TernaryLabel> vertex_labels;  // label at each breakpoint
  std::vector<std::string> warnings;
};

inline constexpr double kDefaultMergeTol = 1e-9;

// Built layer by layer: each neuron's pre-activation is affine on the cells
// of the previous layers, so its zeros are found exactly per cell.
template <class T>
Complex1D<T> complex_1d(const Parameter<T>& p, double zero_tol = kDefaultZeroTol,
                        double merge_tol = kDefaultMergeTol);

// Interior point used to represent a cell.
template <class T>
T cell_representative(const Cell1D<T>& cell);

template <class T>
struct DecisiveSet {
  Batch<T> points;
  std::vector<size_t> cell_of_point;  // cell (or region) index per point
  std::vector<size_t> skipped;        // cells whose label contains a zero
};

// Two interior points per top cell: the trisection points of bounded cells,
// breakpoint -/+ {1, 2} on unbounded cells and {1, 2} when there is no
// breakpoint. Cells with a zero in their label are skipped unless the policy
// is permissive and the points pass it.
template <class T>
DecisiveSet<T> decisive_set(const Parameter<T>& p, const Complex1D<T>& c,
                            SmoothnessPolicy policy = SmoothnessPolicy::kStrict,
                            double zero_tol = kDefaultZeroTol);

template <class T>
struct RegionAtlas {
  std::map<TernaryLabel, Batch<T>> regions;  // zero-free labels only
  std::vector<TernaryLabel> insufficient;    // fewer than n_0 + 1 independent points
  size_t samples = 0;
};

struct Box {
  double lo = -10;
  double hi = 10;
};

// Samples the box and groups points by zero-free label, keeping up to n_0 + 1
// affinely independent representatives per label. Regions with small measure
// in the box can be missed.
template <class T>
RegionAtlas<T> discover_regions(const Parameter<T>& p, Box box, size_t n_samples,
                                std::uint64_t seed, double zero_tol = kDefaultZeroTol);

// n_0 + 1 representatives per sampled region. Regions with fewer independent
// representatives are listed in `skipped` by their index in atlas.regions.
template <class T>
DecisiveSet<T> decisive_set(const Parameter<T>& p, const RegionAtlas<T>& atlas);

// Per top cell: value at the representative, then the x-Jacobian (row-major
// n_m x n_0).
template <class T>
struct SlopesValues {
  Batch<T> representatives;
  std::vector<T> entries;
};

template <class T>
SlopesValues<T> sv_map(const Parameter<T>& p, const Complex1D<T>& c);
template <class T>
SlopesValues<T> sv_map(const Parameter<T>& p, const RegionAtlas<T>& atlas);

inline constexpr double kSvRankTol = 1e-7;

// Numeric rank of the parameter derivative of the slopes-and-values map,
// by central differences with the cell representatives held fixed. Throws
// CombinatorialInstability if the perturbed complex differs inside
// [-R, R], R = max(1/sqrt(h), 4 * extent of the unperturbed complex).
template <class T>
RankReport<double> sv_rank(const Parameter<T>& p, double h = 1e-6, double tol = kSvRankTol);

// coeffs . x + constant = 0, scaled so the first nonzero coefficient is 1.
template <class T>
struct AffineEquation {
  std::vector<T> coeffs;
  T constant{0};
};

// Fits the affine piece on each side from n_0 + 1 points per cell and returns
// the wall along which the two pieces agree. Throws NoDetectableWall when the
// pieces have equal linear parts.
template <class T>
AffineEquation<T> detect_hyperplane(const Parameter<T>& p, const Batch<T>& cell_x,
                                    const Batch<T>& cell_y);

template <class T>
struct StabilityVerdict {
  bool stable = true;
  double eps = 0;
  size_t trials = 0;
  std::optional<std::vector<T>> witness;  // perturbation that changed the complex
  std::string reason;
};

// Random perturbations with entries eps * k / 1024, |k| <= 1024. Compares cell
// counts, cell labels left to right and vertex labels. A probe, not a proof.
template <class T>
StabilityVerdict<T> probe_combinatorial_stability(const Parameter<T>& p, const T& eps,
                                                  size_t trials, std::uint64_t seed);

// Every zero of every pre-activation node map has nonzero slope on each
// adjacent cell, and no node map vanishes on a whole cell.
template <class T>
bool is_transversal_1d(const Parameter<T>& p, const Complex1D<T>& c);

// Within each layer, the walls of different neurons are distinct and no
// neuron's pre-activation vanishes identically on a cell.
template <class T>
bool is_generic_1d(const Parameter<T>& p, const Complex1D<T>& c);

}  // namespace fundim
