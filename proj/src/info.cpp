#include "mahgenta/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mahgenta/error.hpp"

namespace mahgenta {

namespace {

double entropy_nats(const DenseTensor& m) {
  double h = 0.0;
  for (double v : m.values()) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double log_cells(const DenseTensor& m) { return std::log(static_cast<double>(m.size())); }

int parity(int n) { return (n % 2 == 0) ? 1 : -1; }

}  // namespace

double entropy(const ProbTensor& p, VarSubset s, Unit unit) {
  return to_unit(entropy_nats(sum_to(p.tensor(), s)), unit);
}

double kl_divergence(const ProbTensor& p, const ProbTensor& q) {
  if (p.subset() != q.subset() || p.dims() != q.dims()) {
    throw DomainError("KL divergence needs tensors of the same shape");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      throw DomainError("KL divergence undefined: cell " + std::to_string(i) +
                        " has p > 0 but q = 0");
    }
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

double mmi(const ProbTensor& p, VarSubset s, Unit unit) {
  if (s.empty()) throw DomainError("multiple mutual information needs a non-empty subset");
  double total = 0.0;
  for (VarSubset t : subsets_of(s)) {
    if (t.empty()) continue;
    total -= parity(t.size()) * entropy_nats(sum_to(p.tensor(), t));
  }
  return to_unit(total, unit);
}

double j_value(const ProbTensor& p, VarSubset s, Unit unit) {
  double total = 0.0;
  for (VarSubset t : subsets_of(s)) {
    if (t.empty()) continue;  // KL(p_∅; u_∅) = 0
    const DenseTensor m = sum_to(p.tensor(), t);
    total += parity(s.size() - t.size()) * (log_cells(m) - entropy_nats(m));
  }
  return to_unit(total, unit);
}

// ---------------------------------------------------------------------------
// Projector

Projector::Projector(ProbTensor p, ProjectionMethod method, double tolerance)
    : p_(std::move(p)), shape_(full_shape_of(p_.tensor())), method_(method),
      tolerance_(tolerance) {}

ProbTensor Projector::projection(const InteractionCollection& collection) {
  const auto key = collection.sorted();
  {
    std::lock_guard lock(mu_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second.first;
  }
  ProbTensor q = method_ == ProjectionMethod::ipf ? ipf_project(p_, collection, tolerance_)
                                                  : project(p_, collection, {tolerance_});
  const double kl = kl_divergence(p_, q);
  std::lock_guard lock(mu_);
  return memo_.try_emplace(key, std::move(q), kl).first->second.first;
}

double Projector::residual_kl(const InteractionCollection& collection) {
  const auto key = collection.sorted();
  {
    std::lock_guard lock(mu_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second.second;
  }
  projection(collection);
  std::lock_guard lock(mu_);
  return memo_.at(key).second;
}

std::size_t Projector::cached() const {
  std::lock_guard lock(mu_);
  return memo_.size();
}

double refined_information(Projector& projector, const InteractionCollection& collection,
                           VarSubset s) {
  if (!is_hierarchical(collection)) {
    throw DomainError("refined information needs a hierarchical context");
  }
  if (collection.contains(s)) {
    throw DomainError(s.to_string() + " is already in the context collection");
  }
  const InteractionCollection next = collection.plus(s);
  if (!is_hierarchical(next)) {
    throw DomainError("adding " + s.to_string() + " breaks the hierarchy");
  }
  return projector.residual_kl(collection) - projector.residual_kl(next);
}

double refined_information(const ProbTensor& p, const InteractionCollection& collection,
                           VarSubset s) {
  Projector projector(p);
  return refined_information(projector, collection, s);
}

double canonical_ri(Projector& projector, VarSubset s, CanonicalMode mode) {
  if (s.size() < 2) throw DomainError("canonical refined information needs |S| >= 2");
  InteractionCollection context;
  if (mode == CanonicalMode::marginal) {
    for (VarSubset t : subsets_of(s)) {
      if (t != s) context.add(t);
    }
  } else {
    for (VarSubset t : subsets_of(projector.shape().all())) {
      if (!s.is_subset_of(t)) context.add(t);
    }
  }
  return refined_information(projector, context, s);
}

double canonical_ri(const ProbTensor& p, VarSubset s, CanonicalMode mode) {
  Projector projector(p);
  return canonical_ri(projector, s, mode);
}

// ---------------------------------------------------------------------------
// Chains

Chain::Chain(std::vector<InteractionCollection> collections)
    : collections_(std::move(collections)) {
  for (std::size_t t = 1; t < collections_.size(); ++t) {
    const auto& prev = collections_[t - 1];
    const auto& next = collections_[t];
    bool superset = next.size() > prev.size();
    for (VarSubset s : prev.insertion_order()) superset = superset && next.contains(s);
    if (!superset) {
      throw DomainError("chain step " + std::to_string(t) + " is not a strict enlargement");
    }
  }
}

Chain Chain::from_additions(std::span<const VarSubset> additions) {
  std::vector<InteractionCollection> cs(1);
  for (VarSubset s : additions) {
    if (cs.back().contains(s)) throw DomainError(s.to_string() + " added twice to the chain");
    cs.push_back(cs.back().plus(s));
  }
  return Chain(std::move(cs));
}

Chain Chain::random_maximal(int d, Rng& rng) {
  const auto all = subsets_of(VarSubset::full(d));
  InteractionCollection current;
  std::vector<VarSubset> additions;
  while (current.size() < all.size()) {
    std::vector<VarSubset> admissible;
    for (VarSubset s : all) {
      if (!current.contains(s) && heredity_count(s, current) == s.size()) {
        admissible.push_back(s);
      }
    }
    const VarSubset pick = admissible[uniform_below(rng, admissible.size())];
    current.add(pick);
    additions.push_back(pick);
  }
  return from_additions(additions);
}

std::vector<VarSubset> Chain::added_subsets() const {
  if (!maximally_refined()) return {};
  std::vector<VarSubset> out;
  for (std::size_t t = 1; t < collections_.size(); ++t) {
    for (VarSubset s : collections_[t].insertion_order()) {
      if (!collections_[t - 1].contains(s)) out.push_back(s);
    }
  }
  return out;
}

bool Chain::complete(int d) const {
  if (collections_.empty()) return false;
  return collections_.front().size() == 1 &&
         collections_.back() == InteractionCollection::powerset(VarSubset::full(d));
}

bool Chain::hierarchical() const {
  return std::all_of(collections_.begin(), collections_.end(),
                     [](const auto& c) { return is_hierarchical(c); });
}

bool Chain::maximally_refined() const {
  for (std::size_t t = 1; t < collections_.size(); ++t) {
    if (collections_[t].size() != collections_[t - 1].size() + 1) return false;
  }
  return true;
}

double DecompositionReport::residual() const {
  double sum = 0.0;
  for (const auto& s : steps) sum += s.nats;
  return std::abs(sum - total_kl);
}

DecompositionReport decompose_chain(Projector& projector, const Chain& chain) {
  const int d = projector.shape().d();
  if (!chain.complete(d)) throw DomainError("decomposition needs a complete chain");
  if (!chain.hierarchical()) throw DomainError("decomposition needs a hierarchical chain");
  if (!chain.maximally_refined()) {
    throw DomainError("decomposition needs a maximally refined chain");
  }
  DecompositionReport report;
  report.total_kl = kl_divergence(projector.target(),
                                  ProbTensor::uniform(projector.shape(), projector.shape().all()));
  const auto& cs = chain.collections();
  const auto added = chain.added_subsets();
  double before = projector.residual_kl(cs.front());
  for (std::size_t t = 1; t < cs.size(); ++t) {
    const double after = projector.residual_kl(cs[t]);
    DecompositionStep step;
    step.subset = added[t - 1];
    step.context = cs[t - 1];
    step.nats = before - after;
    step.bits = to_unit(step.nats, Unit::bits);
    report.steps.push_back(std::move(step));
    before = after;
  }
  return report;
}

DecompositionReport decompose_chain(const ProbTensor& p, const Chain& chain) {
  Projector projector(p);
  return decompose_chain(projector, chain);
}

Chain greedy_chain(Projector& projector) {
  const auto all = subsets_of(projector.shape().all());
  InteractionCollection current;
  std::vector<VarSubset> additions;
  while (current.size() < all.size()) {
    VarSubset best;
    double best_ri = -std::numeric_limits<double>::infinity();
    for (VarSubset s : all) {
      if (current.contains(s) || heredity_count(s, current) != s.size()) continue;
      const double ri = refined_information(projector, current, s);
      if (ri > best_ri + 1e-12) {
        best_ri = ri;
        best = s;
      }
    }
    current.add(best);
    additions.push_back(best);
  }
  return Chain::from_additions(additions);
}

}  // namespace mahgenta
