#include "mahgenta/core.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>

#include "mahgenta/error.hpp"

namespace mahgenta {

namespace {

std::uint64_t initial_cap() {
  if (const char* env = std::getenv("MAHGENTA_ENUM_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultEnumerationCap;
}

std::atomic<std::uint64_t>& cap_storage() {
  static std::atomic<std::uint64_t> cap{initial_cap()};
  return cap;
}

}  // namespace

std::uint64_t enumeration_cap() { return cap_storage().load(std::memory_order_relaxed); }

void set_enumeration_cap(std::uint64_t cap) {
  if (cap == 0) throw ArgumentError("enumeration cap must be positive");
  cap_storage().store(cap, std::memory_order_relaxed);
}

// ---------------------------------------------------------------------------
// VarSubset

VarSubset VarSubset::of(std::span<const int> members) {
  std::uint64_t mask = 0;
  for (int k : members) {
    if (k < 0 || k >= kMaxVariables) {
      throw DomainError("variable index " + std::to_string(k) + " out of range");
    }
    const std::uint64_t bit = std::uint64_t{1} << k;
    if (mask & bit) throw DomainError("duplicate variable in subset");
    mask |= bit;
  }
  return VarSubset(mask);
}

VarSubset VarSubset::of(std::initializer_list<int> members) {
  return of(std::span<const int>(members.begin(), members.size()));
}

VarSubset VarSubset::of_one_based(std::span<const int> members) {
  std::vector<int> zero(members.begin(), members.end());
  for (int& k : zero) --k;
  return of(zero);
}

VarSubset VarSubset::full(int d) {
  if (d < 0 || d > kMaxVariables) throw DomainError("too many variables");
  return VarSubset(d == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1);
}

int VarSubset::size() const { return std::popcount(mask_); }

std::vector<int> VarSubset::members() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (std::uint64_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

std::vector<int> VarSubset::members_one_based() const {
  auto m = members();
  for (int& k : m) ++k;
  return m;
}

std::strong_ordering VarSubset::operator<=>(const VarSubset& o) const {
  if (auto c = size() <=> o.size(); c != 0) return c;
  // Equal sizes: the first differing member decides. The lowest bit present in
  // exactly one of the two masks belongs to the lexicographically smaller list.
  const std::uint64_t diff = mask_ ^ o.mask_;
  if (diff == 0) return std::strong_ordering::equal;
  const std::uint64_t low = diff & (~diff + 1);
  return (mask_ & low) ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::string VarSubset::to_string() const {
  std::string s = "{";
  bool first = true;
  for (int k : members()) {
    if (!first) s += ',';
    s += std::to_string(k + 1);
    first = false;
  }
  return s + "}";
}

std::vector<VarSubset> subsets_of(VarSubset s) {
  std::vector<VarSubset> out;
  const std::uint64_t m = s.mask();
  // Standard submask enumeration, descending; sort afterwards.
  for (std::uint64_t t = m;; t = (t - 1) & m) {
    out.push_back(VarSubset::from_mask(t));
    if (t == 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Shape

Shape::Shape(std::vector<int> cardinalities) : cards_(std::move(cardinalities)) {
  if (cards_.empty()) throw DomainError("shape needs at least one variable");
  if (cards_.size() > static_cast<std::size_t>(kMaxVariables)) {
    throw DomainError("at most 64 variables are supported");
  }
  for (std::size_t k = 0; k < cards_.size(); ++k) {
    if (cards_[k] < 2) {
      throw DomainError("variable " + std::to_string(k + 1) + " has cardinality " +
                        std::to_string(cards_[k]) + "; every variable needs at least 2");
    }
  }
}

std::vector<int> Shape::dims(VarSubset s) const {
  std::vector<int> out;
  for (int k : s.members()) out.push_back(cardinality(k));
  return out;
}

std::uint64_t Shape::cell_count(VarSubset s) const {
  std::uint64_t n = 1;
  for (int k : s.members()) {
    const auto c = static_cast<std::uint64_t>(cardinality(k));
    if (n > std::numeric_limits<std::uint64_t>::max() / c) {
      throw CapacityError("event count of " + s.to_string() + " overflows 64 bits");
    }
    n *= c;
  }
  return n;
}

std::uint64_t Shape::free_parameter_count(VarSubset s) const {
  std::uint64_t n = 1;
  for (int k : s.members()) n *= static_cast<std::uint64_t>(cardinality(k) - 1);
  return n;
}

void Shape::require_enumerable(VarSubset s, const char* what) const {
  const std::uint64_t n = cell_count(s);
  if (n > enumeration_cap()) {
    throw CapacityError(std::string(what) + ": " + std::to_string(n) +
                        " cells exceed the enumeration cap of " +
                        std::to_string(enumeration_cap()) +
                        " (use the sampling routines or raise MAHGENTA_ENUM_CAP)");
  }
}

// ---------------------------------------------------------------------------
// InteractionCollection

InteractionCollection::InteractionCollection() { add(VarSubset{}); }

InteractionCollection::InteractionCollection(std::span<const VarSubset> subsets)
    : InteractionCollection() {
  for (VarSubset s : subsets) add(s);
}

InteractionCollection::InteractionCollection(std::initializer_list<VarSubset> subsets)
    : InteractionCollection(std::span<const VarSubset>(subsets.begin(), subsets.size())) {}

InteractionCollection InteractionCollection::powerset(VarSubset s) {
  const auto all = subsets_of(s);
  return InteractionCollection(all);
}

InteractionCollection InteractionCollection::up_to_order(int d, int order) {
  InteractionCollection c;
  for (VarSubset s : subsets_of(VarSubset::full(d))) {
    if (s.size() <= order) c.add(s);
  }
  return c;
}

bool InteractionCollection::add(VarSubset s) {
  if (!set_.insert(s).second) return false;
  order_.push_back(s);
  return true;
}

InteractionCollection InteractionCollection::plus(VarSubset s) const {
  InteractionCollection c = *this;
  c.add(s);
  return c;
}

bool is_hierarchical(const InteractionCollection& collection) {
  for (VarSubset s : collection.insertion_order()) {
    for (int k : s.members()) {
      if (!collection.contains(s.without(k))) return false;
    }
  }
  return true;
}

int heredity_count(VarSubset s, const InteractionCollection& collection) {
  if (s.empty()) throw DomainError("heredity count is undefined for the empty set");
  int n = 0;
  for (int k : s.members()) n += collection.contains(s.without(k)) ? 1 : 0;
  return n;
}

// ---------------------------------------------------------------------------
// DenseTensor

namespace {

std::size_t product(std::span<const int> dims) {
  std::size_t n = 1;
  for (int v : dims) n *= static_cast<std::size_t>(v);
  return n;
}

}  // namespace

DenseTensor::DenseTensor(VarSubset subset, std::vector<int> dims, std::vector<double> values)
    : subset_(subset), dims_(std::move(dims)), values_(std::move(values)) {
  if (static_cast<int>(dims_.size()) != subset_.size()) {
    throw DomainError("tensor over " + subset_.to_string() + " needs " +
                      std::to_string(subset_.size()) + " dims");
  }
  if (values_.size() != product(dims_)) {
    throw DomainError("tensor over " + subset_.to_string() + " has " +
                      std::to_string(values_.size()) + " values, expected " +
                      std::to_string(product(dims_)));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("tensor entries must be finite");
  }
}

DenseTensor DenseTensor::zeros(const Shape& shape, VarSubset subset) {
  return filled(shape, subset, 0.0);
}

DenseTensor DenseTensor::filled(const Shape& shape, VarSubset subset, double value) {
  auto dims = shape.dims(subset);
  const std::size_t n = product(dims);
  return DenseTensor(subset, std::move(dims), std::vector<double>(n, value));
}

DenseTensor DenseTensor::scalar(double value) { return DenseTensor({}, {}, {value}); }

double DenseTensor::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

void DenseTensor::require_same_layout(const DenseTensor& o) const {
  if (subset_ != o.subset_ || dims_ != o.dims_) {
    throw DomainError("tensor layouts differ: " + subset_.to_string() + " vs " +
                      o.subset_.to_string());
  }
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& o) {
  require_same_layout(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& o) {
  require_same_layout(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

DenseTensor& DenseTensor::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

double DenseTensor::max_abs_diff(const DenseTensor& o) const {
  require_same_layout(o);
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    m = std::max(m, std::abs(values_[i] - o.values_[i]));
  }
  return m;
}

// ---------------------------------------------------------------------------
// ProbTensor

ProbTensor::ProbTensor(DenseTensor t) : t_(std::move(t)) {
  double total = 0.0;
  for (double v : t_.values()) {
    if (v < 0.0) throw DomainError("probability tensor has a negative entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("probability tensor sums to " + std::to_string(total));
  }
}

ProbTensor ProbTensor::uniform(const Shape& shape, VarSubset subset) {
  const auto n = shape.cell_count(subset);
  return ProbTensor(DenseTensor::filled(shape, subset, 1.0 / static_cast<double>(n)));
}

ProbTensor ProbTensor::normalize(DenseTensor t) {
  double total = 0.0;
  for (double v : t.values()) {
    if (v < 0.0) throw DomainError("cannot normalise a tensor with negative entries");
    total += v;
  }
  if (!(total > 0.0)) throw DomainError("cannot normalise a tensor with zero mass");
  t *= 1.0 / total;
  return ProbTensor(std::move(t));
}

// ---------------------------------------------------------------------------
// Index maps and tensor operations

void unravel(std::size_t flat, std::span<const int> dims, std::span<int> digits) {
  for (std::size_t a = dims.size(); a-- > 0;) {
    const auto c = static_cast<std::size_t>(dims[a]);
    digits[a] = static_cast<int>(flat % c);
    flat /= c;
  }
}

std::vector<std::size_t> projection_map(VarSubset from, std::span<const int> from_dims,
                                        VarSubset to) {
  if (!to.is_subset_of(from)) {
    throw DomainError(to.to_string() + " is not a subset of " + from.to_string());
  }
  const auto vars = from.members();
  const std::size_t axes = vars.size();
  // Stride of each source axis inside the target tensor (0 when dropped).
  std::vector<std::size_t> stride(axes, 0);
  std::size_t s = 1;
  for (std::size_t a = axes; a-- > 0;) {
    if (to.contains(vars[a])) {
      stride[a] = s;
      s *= static_cast<std::size_t>(from_dims[a]);
    }
  }
  const std::size_t n = product(from_dims);
  std::vector<std::size_t> out(n);
  std::vector<int> digit(axes, 0);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = offset;
    for (std::size_t a = axes; a-- > 0;) {
      if (++digit[a] < from_dims[a]) {
        offset += stride[a];
        break;
      }
      offset -= stride[a] * static_cast<std::size_t>(from_dims[a] - 1);
      digit[a] = 0;
    }
  }
  return out;
}

Shape full_shape_of(const DenseTensor& t) {
  if (t.subset() != VarSubset::full(static_cast<int>(t.dims().size()))) {
    throw DomainError("expected a tensor over the full variable set, got " +
                      t.subset().to_string());
  }
  return Shape(t.dims());
}

namespace {

std::vector<int> dims_of_subset(const DenseTensor& t, VarSubset s) {
  const auto vars = t.subset().members();
  std::vector<int> out;
  for (std::size_t a = 0; a < vars.size(); ++a) {
    if (s.contains(vars[a])) out.push_back(t.dims()[a]);
  }
  return out;
}

}  // namespace

DenseTensor sum_to(const DenseTensor& t, VarSubset s) {
  if (!s.is_subset_of(t.subset())) {
    throw DomainError("cannot marginalise onto " + s.to_string() + ": not a subset of " +
                      t.subset().to_string());
  }
  auto dims = dims_of_subset(t, s);
  std::vector<double> out(product(dims), 0.0);
  const auto map = projection_map(t.subset(), t.dims(), s);
  for (std::size_t i = 0; i < map.size(); ++i) out[map[i]] += t[i];
  return DenseTensor(s, std::move(dims), std::move(out));
}

ProbTensor marginalize(const ProbTensor& p, VarSubset s) {
  return ProbTensor(sum_to(p.tensor(), s));
}

DenseTensor expand_uniform(const DenseTensor& t, VarSubset s, const Shape& shape) {
  if (!t.subset().is_subset_of(s)) {
    throw DomainError("cannot expand " + t.subset().to_string() + " to " + s.to_string() +
                      ": not a superset");
  }
  auto dims = shape.dims(s);
  const auto map = projection_map(s, dims, t.subset());
  const double scale = 1.0 / static_cast<double>(shape.cell_count(s - t.subset()));
  std::vector<double> out(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) out[i] = t[map[i]] * scale;
  return DenseTensor(s, std::move(dims), std::move(out));
}

DenseTensor center_fibers(DenseTensor t) {
  const auto& dims = t.dims();
  const std::size_t n = t.size();
  std::size_t inner = n;
  for (std::size_t a = 0; a < dims.size(); ++a) {
    const auto len = static_cast<std::size_t>(dims[a]);
    inner /= len;
    const std::size_t outer = n / (inner * len);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t r = 0; r < inner; ++r) {
        const std::size_t base = o * len * inner + r;
        double mean = 0.0;
        for (std::size_t j = 0; j < len; ++j) mean += t[base + j * inner];
        mean /= static_cast<double>(len);
        for (std::size_t j = 0; j < len; ++j) t[base + j * inner] -= mean;
      }
    }
  }
  return t;
}

}  // namespace mahgenta
