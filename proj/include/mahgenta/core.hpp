#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace mahgenta {

inline constexpr int kMaxVariables = 64;

// ---------------------------------------------------------------------------
// Enumeration cap
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Current cap on the number of cells an exact operation may enumerate.
/// Initialised from MAHGENTA_ENUM_CAP when set, otherwise 10^7.
std::uint64_t enumeration_cap();
void set_enumeration_cap(std::uint64_t cap);

// ---------------------------------------------------------------------------
// VarSubset
// ---------------------------------------------------------------------------

/// A subset of variables, stored as a bit mask over 0-based indices.
/// Ordering is canonical: by size, then lexicographically by members.
class VarSubset {
 public:
  constexpr VarSubset() = default;
  static constexpr VarSubset from_mask(std::uint64_t mask) { return VarSubset(mask); }
  /// 0-based members; duplicates rejected.
  static VarSubset of(std::span<const int> members);
  static VarSubset of(std::initializer_list<int> members);
  /// 1-based members as used in files and reports.
  static VarSubset of_one_based(std::span<const int> members);
  static VarSubset full(int d);

  constexpr std::uint64_t mask() const { return mask_; }
  int size() const;
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool contains(int k) const { return (mask_ >> k) & 1U; }
  constexpr bool is_subset_of(VarSubset other) const { return (mask_ & ~other.mask_) == 0; }
  std::vector<int> members() const;
  std::vector<int> members_one_based() const;

  constexpr VarSubset operator|(VarSubset o) const { return VarSubset(mask_ | o.mask_); }
  constexpr VarSubset operator&(VarSubset o) const { return VarSubset(mask_ & o.mask_); }
  constexpr VarSubset operator-(VarSubset o) const { return VarSubset(mask_ & ~o.mask_); }
  constexpr VarSubset with(int k) const { return VarSubset(mask_ | (std::uint64_t{1} << k)); }
  constexpr VarSubset without(int k) const { return VarSubset(mask_ & ~(std::uint64_t{1} << k)); }

  constexpr bool operator==(const VarSubset&) const = default;
  std::strong_ordering operator<=>(const VarSubset& o) const;

  /// "{1,2,3}" with 1-based members; "{}" for the empty set.
  std::string to_string() const;

 private:
  constexpr explicit VarSubset(std::uint64_t mask) : mask_(mask) {}
  std::uint64_t mask_ = 0;
};

/// Every subset of `s` (including the empty set and `s`), in canonical order.
std::vector<VarSubset> subsets_of(VarSubset s);

// ---------------------------------------------------------------------------
// Shape
// ---------------------------------------------------------------------------

class Shape {
 public:
  Shape() = default;
  explicit Shape(std::vector<int> cardinalities);

  int d() const { return static_cast<int>(cards_.size()); }
  int cardinality(int k) const { return cards_.at(static_cast<std::size_t>(k)); }
  const std::vector<int>& cardinalities() const { return cards_; }
  VarSubset all() const { return VarSubset::full(d()); }
  VarSubset complement(VarSubset s) const { return all() - s; }

  /// Restricted cardinalities I_S in ascending variable order.
  std::vector<int> dims(VarSubset s) const;
  /// |I_S|; throws CapacityError on 64-bit overflow.
  std::uint64_t cell_count(VarSubset s) const;
  std::uint64_t event_count() const { return cell_count(all()); }
  /// Free parameters of a centred tensor over S: prod (I_k - 1).
  std::uint64_t free_parameter_count(VarSubset s) const;
  /// Throws CapacityError naming `what` when |I_S| exceeds the cap.
  void require_enumerable(VarSubset s, const char* what) const;

  bool operator==(const Shape&) const = default;

 private:
  std::vector<int> cards_;
};

// ---------------------------------------------------------------------------
// InteractionCollection
// ---------------------------------------------------------------------------

/// A family of variable subsets. Always contains the empty set. Remembers
/// insertion order, which drives the block schedule of the sampler.
class InteractionCollection {
 public:
  InteractionCollection();
  explicit InteractionCollection(std::span<const VarSubset> subsets);
  InteractionCollection(std::initializer_list<VarSubset> subsets);

  static InteractionCollection powerset(VarSubset s);
  /// All subsets of [d] with at most `order` members.
  static InteractionCollection up_to_order(int d, int order);

  bool add(VarSubset s);
  bool contains(VarSubset s) const { return set_.count(s) != 0; }
  std::size_t size() const { return order_.size(); }
  /// Insertion order, empty set first.
  const std::vector<VarSubset>& insertion_order() const { return order_; }
  /// Canonical order.
  std::vector<VarSubset> sorted() const { return {set_.begin(), set_.end()}; }
  InteractionCollection plus(VarSubset s) const;

  bool operator==(const InteractionCollection& o) const { return set_ == o.set_; }

 private:
  std::vector<VarSubset> order_;
  std::set<VarSubset> set_;
};

bool is_hierarchical(const InteractionCollection& collection);

/// Number of immediate sub-subsets of `s` (one member removed) present in the
/// collection. Throws DomainError for the empty set.
int heredity_count(VarSubset s, const InteractionCollection& collection);

// ---------------------------------------------------------------------------
// Tensors
// ---------------------------------------------------------------------------

/// Real tensor over I_S, row-major with variables in ascending order (the
/// last variable varies fastest).
class DenseTensor {
 public:
  DenseTensor() = default;
  DenseTensor(VarSubset subset, std::vector<int> dims, std::vector<double> values);
  static DenseTensor zeros(const Shape& shape, VarSubset subset);
  static DenseTensor filled(const Shape& shape, VarSubset subset, double value);
  static DenseTensor scalar(double value);

  VarSubset subset() const { return subset_; }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double sum() const;

  DenseTensor& operator+=(const DenseTensor& o);
  DenseTensor& operator-=(const DenseTensor& o);
  DenseTensor& operator*=(double c);
  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator*(DenseTensor a, double c) { return a *= c; }

  double max_abs_diff(const DenseTensor& o) const;

 private:
  void require_same_layout(const DenseTensor& o) const;

  VarSubset subset_;
  std::vector<int> dims_;
  std::vector<double> values_;
};

/// Non-negative tensor summing to one (within 1e-9).
class ProbTensor {
 public:
  ProbTensor() = default;
  explicit ProbTensor(DenseTensor t);
  static ProbTensor uniform(const Shape& shape, VarSubset subset);
  /// Divides by the total; the input must be non-negative with positive sum.
  static ProbTensor normalize(DenseTensor t);

  const DenseTensor& tensor() const { return t_; }
  VarSubset subset() const { return t_.subset(); }
  const std::vector<int>& dims() const { return t_.dims(); }
  std::size_t size() const { return t_.size(); }
  std::span<const double> values() const { return t_.values(); }
  double operator[](std::size_t i) const { return t_[i]; }

 private:
  DenseTensor t_;
};

/// Shape of a tensor that covers variables 0..d-1; DomainError otherwise.
Shape full_shape_of(const DenseTensor& t);

/// For each flat index of a tensor over `from` with dims `from_dims`, the
/// flat index of the cell it maps to in a tensor over `to` (to ⊆ from).
std::vector<std::size_t> projection_map(VarSubset from, std::span<const int> from_dims,
                                        VarSubset to);

/// Sums `t` down onto S ⊆ t.subset(). No normalisation.
DenseTensor sum_to(const DenseTensor& t, VarSubset s);
/// Throws DomainError unless S ⊆ p.subset().
ProbTensor marginalize(const ProbTensor& p, VarSubset s);

/// result(i_S) = t(i_T) * prod_{k in S-T} 1/I_k.
DenseTensor expand_uniform(const DenseTensor& t, VarSubset s, const Shape& shape);

/// Subtracts the mean along every mode in turn; afterwards every fibre sums
/// to zero.
DenseTensor center_fibers(DenseTensor t);

/// Decodes a flat index over `dims` into per-axis digits.
void unravel(std::size_t flat, std::span<const int> dims, std::span<int> digits);

}  // namespace mahgenta
