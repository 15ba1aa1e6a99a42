#include <cmath>
#include <random>

#include "doctest.h"
#include "mahgenta/core.hpp"
#include "mahgenta/error.hpp"
#include "oracles.hpp"

using namespace mahgenta;

namespace {

DenseTensor tensor(VarSubset s, std::vector<int> dims, std::vector<double> v) {
  return DenseTensor(s, std::move(dims), std::move(v));
}

bool fibers_zero(const DenseTensor& t, double tol) {
  // every fibre along every axis sums to zero
  const auto& dims = t.dims();
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    std::vector<int> others;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (k != axis) others.push_back(static_cast<int>(k));
    }
    const auto sums = oracle::marginal({t.values().begin(), t.values().end()}, dims, others);
    for (double s : sums) {
      if (std::abs(s) > tol) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(Shape(std::vector<int>{}), DomainError);
  CHECK_THROWS_AS(Shape({2, 1}), DomainError);
  const Shape s({2, 3, 4});
  CHECK(s.d() == 3);
  CHECK(s.event_count() == 24);
  CHECK(s.cell_count(VarSubset::of({0, 2})) == 8);
  CHECK(s.free_parameter_count(VarSubset::of({1, 2})) == 6);
  CHECK(s.dims(VarSubset::of({2, 0})) == std::vector<int>{2, 4});
}

TEST_CASE("event count overflow is detected") {
  std::vector<int> cards(40, 7);
  const Shape s(cards);
  CHECK_THROWS_AS(s.event_count(), CapacityError);
}

TEST_CASE("enumeration cap guards full enumeration") {
  const auto old = enumeration_cap();
  set_enumeration_cap(100);
  const Shape s({5, 5, 5});
  CHECK_THROWS_AS(s.require_enumerable(s.all(), "test"), CapacityError);
  CHECK_NOTHROW(s.require_enumerable(VarSubset::of({0, 1}), "test"));
  set_enumeration_cap(old);
  CHECK_THROWS_AS(set_enumeration_cap(0), ArgumentError);
}

TEST_CASE("subset ordering and printing") {
  const auto a = VarSubset::of({1});
  const auto b = VarSubset::of({0, 2});
  CHECK(a < b);  // smaller first
  CHECK(VarSubset::of({0, 1}) < VarSubset::of({0, 2}));
  CHECK(VarSubset::of({0, 2}) < VarSubset::of({1, 2}));
  CHECK(b.to_string() == "{1,3}");
  CHECK(VarSubset().to_string() == "{}");
  const int one_based[] = {3, 1};
  CHECK(VarSubset::of_one_based(one_based) == b);
  CHECK_THROWS_AS(VarSubset::of({1, 1}), DomainError);
  CHECK(subsets_of(VarSubset::of({0, 1, 2})).size() == 8);
}

TEST_CASE("marginalize examples") {
  const Shape s({2, 2, 2});
  const auto u = ProbTensor::uniform(s, s.all());
  const auto m = marginalize(u, VarSubset::of({0, 1}));
  for (double v : m.values()) CHECK(v == doctest::Approx(0.25));

  const auto x = oracle::xor3();
  CHECK(marginalize(x, s.all()).tensor().max_abs_diff(x.tensor()) == 0.0);
  const auto x12 = marginalize(x, VarSubset::of({0, 1}));
  for (double v : x12.values()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

  CHECK_THROWS_AS(marginalize(x12, VarSubset::of({2})), DomainError);
}

TEST_CASE("marginalize matches brute-force summation") {
  std::mt19937_64 rng(11);
  const std::vector<int> cards{2, 3, 4};
  for (int rep = 0; rep < 10; ++rep) {
    const auto p = oracle::random_dist(cards, rng);
    for (VarSubset t : subsets_of(VarSubset::full(3))) {
      const auto lib = marginalize(p, t);
      const auto ref = oracle::marginal(oracle::values(p), cards, t.members());
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(lib[i] == doctest::Approx(ref[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("tower property") {
  std::mt19937_64 rng(5);
  const auto p = oracle::random_dist({3, 2, 3, 2}, rng);
  const auto all = VarSubset::full(4);
  for (VarSubset t : subsets_of(all)) {
    const auto pt = marginalize(p, t);
    for (VarSubset s : subsets_of(t)) {
      CHECK(marginalize(pt, s).tensor().max_abs_diff(marginalize(p, s).tensor()) < 1e-12);
    }
  }
}

TEST_CASE("expand_uniform examples") {
  const Shape s({2, 2});
  const auto e = expand_uniform(DenseTensor::scalar(1.0), s.all(), s);
  for (double v : e.values()) CHECK(v == 0.25);

  const auto t = tensor(VarSubset::of({0}), {2}, {0.7, 0.3});
  const auto r = expand_uniform(t, s.all(), s);
  CHECK(r[0] == doctest::Approx(0.35));
  CHECK(r[1] == doctest::Approx(0.35));
  CHECK(r[2] == doctest::Approx(0.15));
  CHECK(r[3] == doctest::Approx(0.15));
  CHECK(expand_uniform(t, t.subset(), s).max_abs_diff(t) == 0.0);
  CHECK_THROWS_AS(expand_uniform(r, VarSubset::of({0}), s), DomainError);
}

TEST_CASE("expand_uniform is a right inverse of summation") {
  std::mt19937_64 rng(3);
  const Shape shape({3, 2, 4});
  std::normal_distribution<double> n;
  for (VarSubset s : subsets_of(shape.all())) {
    for (VarSubset t : subsets_of(s)) {
      DenseTensor x = DenseTensor::zeros(shape, t);
      for (double& v : x.values()) v = n(rng);
      const auto up = expand_uniform(x, s, shape);
      CHECK(std::abs(up.sum() - x.sum()) < 1e-12);
      CHECK(sum_to(up, t).max_abs_diff(x) < 1e-12);
    }
  }
}

TEST_CASE("center_fibers examples") {
  const auto eye = tensor(VarSubset::of({0, 1}), {2, 2}, {1, 0, 0, 1});
  const auto c = center_fibers(eye);
  CHECK(c[0] == doctest::Approx(0.5));
  CHECK(c[1] == doctest::Approx(-0.5));
  CHECK(c[2] == doctest::Approx(-0.5));
  CHECK(c[3] == doctest::Approx(0.5));

  const auto k = tensor(VarSubset::of({0, 1}), {2, 3}, std::vector<double>(6, 4.2));
  const auto ck = center_fibers(k);
  for (double v : ck.values()) CHECK(std::abs(v) < 1e-15);
  CHECK(center_fibers(c).max_abs_diff(c) < 1e-15);
}

TEST_CASE("center_fibers properties") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  const Shape shape({3, 4, 2});
  for (VarSubset s : subsets_of(shape.all())) {
    if (s.empty()) continue;
    DenseTensor a = DenseTensor::zeros(shape, s), b = DenseTensor::zeros(shape, s);
    for (double& v : a.values()) v = n(rng);
    for (double& v : b.values()) v = n(rng);
    const auto ca = center_fibers(a);
    CHECK(fibers_zero(ca, 1e-12));
    // idempotent
    CHECK(center_fibers(ca).max_abs_diff(ca) < 1e-12);
    // linear
    const auto lin = center_fibers(a * 2.0 + b);
    CHECK(lin.max_abs_diff(ca * 2.0 + center_fibers(b)) < 1e-12);
    // the removed part has no top-order component
    const auto removed = center_fibers(a - ca);
    for (double v : removed.values()) CHECK(std::abs(v) < 1e-12);
    // equals the Moebius alternating sum
    const auto ref = oracle::moebius_center({a.values().begin(), a.values().end()}, a.dims());
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(ca[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("hierarchy predicates") {
  const auto e = VarSubset();
  const auto s1 = VarSubset::of({0}), s2 = VarSubset::of({1}), s3 = VarSubset::of({2});
  const auto s12 = VarSubset::of({0, 1});
  CHECK(is_hierarchical(InteractionCollection{e, s1, s2, s12}));
  CHECK_FALSE(is_hierarchical(InteractionCollection{e, s12}));
  CHECK(is_hierarchical(InteractionCollection{}));
  CHECK(InteractionCollection{}.contains(e));

  const InteractionCollection c{e, s1, s2, s3, s12};
  CHECK(heredity_count(VarSubset::of({0, 1, 2}), c) == 1);
  CHECK(heredity_count(s1, InteractionCollection{}) == 1);
  CHECK(heredity_count(VarSubset::of({0, 2}), c) == 2);
  CHECK_THROWS_AS(heredity_count(e, c), DomainError);
}

TEST_CASE("collections keep insertion order") {
  InteractionCollection c;
  c.add(VarSubset::of({1, 2}));
  c.add(VarSubset::of({0}));
  CHECK_FALSE(c.add(VarSubset::of({0})));
  REQUIRE(c.insertion_order().size() == 3);
  CHECK(c.insertion_order()[1] == VarSubset::of({1, 2}));
  CHECK(c.sorted()[1] == VarSubset::of({0}));
  CHECK(InteractionCollection::up_to_order(4, 2).size() == 11);
}

TEST_CASE("probability tensors validate") {
  CHECK_THROWS_AS(oracle::make_dist({2}, {0.6, 0.6}), DomainError);
  CHECK_THROWS_AS(oracle::make_dist({2}, {1.2, -0.2}), DomainError);
  CHECK_THROWS_AS(tensor(VarSubset::of({0}), {2}, {1.0, NAN}), DomainError);
  CHECK_THROWS_AS(tensor(VarSubset::of({0}), {3}, {1.0, 2.0}), DomainError);
}

}  // TEST_SUITE
