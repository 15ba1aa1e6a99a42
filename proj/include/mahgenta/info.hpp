#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "mahgenta/core.hpp"
#include "mahgenta/loglinear.hpp"
#include "mahgenta/rng.hpp"

namespace mahgenta {

enum class Unit { nats, bits };

inline constexpr double kLn2 = 0.69314718055994530942;

inline double to_unit(double nats, Unit unit) { return unit == Unit::bits ? nats / kLn2 : nats; }

/// Shannon entropy of the marginal of p on S (0 log 0 = 0).
double entropy(const ProbTensor& p, VarSubset s, Unit unit = Unit::nats);

/// KL(p; q) in nats. Throws DomainError naming the first cell with p > 0 = q.
double kl_divergence(const ProbTensor& p, const ProbTensor& q);

/// Multiple mutual information: sum over T ⊆ S of (-1)^{|T|-1} H_T.
double mmi(const ProbTensor& p, VarSubset s, Unit unit = Unit::nats);

/// sum over T ⊆ S of (-1)^{|S|-|T|} KL(p_T; u_T).
double j_value(const ProbTensor& p, VarSubset s, Unit unit = Unit::nats);

enum class ProjectionMethod { gradient, ipf };

/// Memoised projections of one fixed distribution, keyed by collection.
/// Safe to share between threads; a missing entry may be computed twice but
/// readers never observe a partial result.
class Projector {
 public:
  explicit Projector(ProbTensor p, ProjectionMethod method = ProjectionMethod::gradient,
                     double tolerance = 1e-8);

  const ProbTensor& target() const { return p_; }
  const Shape& shape() const { return shape_; }
  /// KL(p; p_hat_I) in nats.
  double residual_kl(const InteractionCollection& collection);
  ProbTensor projection(const InteractionCollection& collection);
  std::size_t cached() const;

 private:
  ProbTensor p_;
  Shape shape_;
  ProjectionMethod method_;
  double tolerance_;
  mutable std::mutex mu_;
  std::map<std::vector<VarSubset>, std::pair<ProbTensor, double>> memo_;
};

/// KL(p; p_hat_I) - KL(p; p_hat_{I+S}) in nats.
double refined_information(Projector& projector, const InteractionCollection& collection,
                           VarSubset s);
double refined_information(const ProbTensor& p, const InteractionCollection& collection,
                           VarSubset s);

enum class CanonicalMode { marginal, conditional };

/// Refined information of S against P(S) - {S} (marginal) or against every
/// subset not containing S (conditional).
double canonical_ri(const ProbTensor& p, VarSubset s, CanonicalMode mode);
double canonical_ri(Projector& projector, VarSubset s, CanonicalMode mode);

/// Increasing sequence of interaction collections.
class Chain {
 public:
  Chain() = default;
  explicit Chain(std::vector<InteractionCollection> collections);
  /// Maximally refined chain starting at {∅} and adjoining `additions` in order.
  static Chain from_additions(std::span<const VarSubset> additions);
  /// A uniformly chosen admissible subset is adjoined at every step until
  /// the powerset of [d] is reached.
  static Chain random_maximal(int d, Rng& rng);

  const std::vector<InteractionCollection>& collections() const { return collections_; }
  /// S_t for each step; empty unless maximally refined.
  std::vector<VarSubset> added_subsets() const;

  bool complete(int d) const;
  bool hierarchical() const;
  bool maximally_refined() const;

 private:
  std::vector<InteractionCollection> collections_;
};

struct DecompositionStep {
  VarSubset subset;
  InteractionCollection context;
  double nats = 0.0;
  double bits = 0.0;
};

struct DecompositionReport {
  std::vector<DecompositionStep> steps;
  double total_kl = 0.0;  // KL(p; u) in nats
  /// |sum of steps - total_kl|.
  double residual() const;
};

/// Refined information of every step of a complete, hierarchical, maximally
/// refined chain. Steps sum to KL(p; u).
DecompositionReport decompose_chain(Projector& projector, const Chain& chain);
DecompositionReport decompose_chain(const ProbTensor& p, const Chain& chain);

/// Builds a maximal chain by always adjoining the admissible subset with the
/// largest refined information (ties: canonical order).
Chain greedy_chain(Projector& projector);

}  // namespace mahgenta
