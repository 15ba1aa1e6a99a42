#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "mahgenta/core.hpp"

namespace mahgenta {

enum class NormalizerStatus { exact, estimated, stale };

/// log Z in nats (= -theta_empty) together with how it was obtained.
struct LogNormalizer {
  double value = 0.0;
  NormalizerStatus status = NormalizerStatus::stale;
  double stderr_nats = 0.0;
};

/// Hierarchical log-linear model q(i) = exp(sum_S theta^S(i_S) - log Z).
/// Each theta^S is kept in the zero-fibre-sum gauge.
class ThetaModel {
 public:
  ThetaModel() = default;
  /// All parameters start at zero (the uniform distribution).
  ThetaModel(Shape shape, const InteractionCollection& collection);

  const Shape& shape() const { return shape_; }
  const InteractionCollection& collection() const { return collection_; }
  /// Non-empty members of the collection in insertion order.
  const std::vector<VarSubset>& subsets() const { return subsets_; }
  bool has(VarSubset s) const { return index_.count(s.mask()) != 0; }

  const DenseTensor& theta(VarSubset s) const;
  /// Replaces theta^S; the tensor must already satisfy the fibre-sum gauge.
  void set_theta(VarSubset s, DenseTensor t);
  /// Adds a zero-initialised parameter tensor; no-op when present.
  void add_interaction(VarSubset s);

  /// Sum of theta^S(i_S); `index` holds one 0-based category per variable.
  double energy(std::span<const int> index) const;

  const LogNormalizer& log_normalizer() const { return log_z_; }
  void set_log_normalizer(LogNormalizer z) { log_z_ = z; }

  /// Free parameters: sum over S of prod (I_k - 1).
  std::uint64_t parameter_count() const;

 private:
  Shape shape_;
  InteractionCollection collection_;
  std::vector<VarSubset> subsets_;
  std::vector<DenseTensor> params_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  LogNormalizer log_z_{0.0, NormalizerStatus::stale, 0.0};
};

/// Target marginals eta^S keyed by subset.
class EtaVector {
 public:
  void set(ProbTensor p) {
    const auto key = p.subset();
    entries_.insert_or_assign(key, std::move(p));
  }
  bool contains(VarSubset s) const { return entries_.count(s) != 0; }
  /// Throws DomainError when the marginal is missing.
  const ProbTensor& at(VarSubset s) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<VarSubset, ProbTensor>& entries() const { return entries_; }

  /// Marginals of `p` on every non-empty member of `collection`.
  static EtaVector from_distribution(const ProbTensor& p, const InteractionCollection& collection);

 private:
  std::map<VarSubset, ProbTensor> entries_;
};

/// Exact evaluation over the full event space. Caches per-subset index
/// tables, so one engine should serve one thread.
class ExactEngine {
 public:
  explicit ExactEngine(const Shape& shape);

  const Shape& shape() const { return shape_; }
  std::size_t cell_count() const { return cells_; }

  /// Unnormalised log-probabilities of every cell. Non-singleton terms are
  /// multiplied by `beta`.
  void energies(const ThetaModel& model, std::vector<double>& out, double beta = 1.0);
  /// Adds a tensor over S to every cell of `out`.
  void add_broadcast(const DenseTensor& t, std::span<double> out);
  /// Sums a full-space array onto S.
  DenseTensor marginal(std::span<const double> full, VarSubset s);

 private:
  struct Indexer {
    std::vector<std::uint32_t> prefix;
    std::vector<std::uint32_t> suffix;
  };
  const Indexer& indexer(VarSubset s);

  Shape shape_;
  std::size_t cells_ = 0;
  int split_ = 0;  // variables [split_, d) form the contiguous suffix block
  std::size_t suffix_cells_ = 1;
  std::unordered_map<std::uint64_t, Indexer> cache_;
};

/// log sum exp over the array; -inf entries are ignored.
double log_sum_exp(std::span<const double> values);

double exact_log_partition(const ThetaModel& model);
/// Recomputes log Z by enumeration and marks it exact.
void refresh_exact_normalizer(ThetaModel& model);

/// The normalised model distribution over the full space.
ProbTensor model_distribution(const ThetaModel& model);
/// eta^S of the model (its exact marginal on S).
ProbTensor model_eta(const ThetaModel& model, VarSubset s);

/// -eta_data^S + eta_model^S.
DenseTensor raw_gradient(const ProbTensor& model_eta_s, const ProbTensor& data_eta_s);
/// The raw gradient projected onto the zero-fibre-sum gauge.
DenseTensor purified_gradient(const ThetaModel& model, const EtaVector& data_eta, VarSubset s);

/// How the raw gradient of theta^S is scaled before centring.
/// cell_count: times |I_S|, the exact Newton step at the uniform
/// distribution. fisher: each entry divided by eta(1 - eta) of the model
/// marginal (diagonal Newton), clipped to +-kFisherClip.
enum class Preconditioner { none, cell_count, fisher };

inline constexpr double kFisherClip = 4.0;

DenseTensor scale_gradient(const DenseTensor& raw, const DenseTensor& model_eta, Preconditioner p);

struct GdOptions {
  double lr = 0.5;
  int epochs = 10;
  /// Stop early once every |eta_model^S - eta_data^S| is below this (0 = off).
  double tolerance = 0.0;
  Preconditioner precondition = Preconditioner::none;
  /// Halve the step whenever the objective rises.
  bool backtrack = false;
  /// Abort with StepSizeError after this many consecutive increases.
  int divergence_patience = 5;
};

struct GdResult {
  ThetaModel model;
  int epochs_run = 0;
  /// Cross-entropy -sum_S <eta_data^S, theta^S> + log Z at the returned model.
  double objective = 0.0;
  /// Largest marginal mismatch at the returned model.
  double residual = 0.0;
  bool converged = false;
};

/// Simultaneous purified-gradient descent on KL(p_data; q_theta) with exact
/// marginals. Parameters stay centred; log Z is refreshed on return.
GdResult gd_fit(ThetaModel model, const EtaVector& data_eta, const GdOptions& options);
ThetaModel gd_fit(ThetaModel model, const EtaVector& data_eta, double lr, int epochs);

struct ProjectOptions {
  double tolerance = 1e-8;
  int max_epochs = 50'000;
};

/// e-projection of p onto M_I: the member of the model family whose
/// marginals on every S in I match those of p. Fitted by gradient descent.
ProbTensor project(const ProbTensor& p, const InteractionCollection& collection,
                   const ProjectOptions& options = {});

/// Classical iterative proportional fitting, kept as an independent check on
/// `project`.
ProbTensor ipf_project(const ProbTensor& p, const InteractionCollection& collection,
                       double tolerance = 1e-8, int max_cycles = 100'000);

}  // namespace mahgenta
