#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mahgenta/core.hpp"
#include "mahgenta/data.hpp"
#include "mahgenta/loglinear.hpp"
#include "mahgenta/mcmc.hpp"

namespace mahgenta {

enum class ErrorMode { exact_kl, estimated_nll };

struct SelectionConfig {
  double tau = 0.30;
  int k = 10;
  int epochs_per_round = 10;
  double lr = 0.50;
  int max_order = 4;
  bool renormalize_score = true;
  ErrorMode error_mode = ErrorMode::exact_kl;
  Preconditioner precondition = Preconditioner::cell_count;
  bool backtrack = true;
  int max_rounds = 1000;
  /// Rounds recorded after early stopping fires, for capacity curves. The
  /// returned model is still the best-validation snapshot.
  int extra_rounds = 0;
  /// Sampled regime.
  int n_chains = 256;
  int sweeps_per_epoch = 1;
  AisOptions ais{};
  /// Called after every recorded round.
  std::function<void(const struct RoundRecord&)> on_round;
};

struct RoundRecord {
  int round = 0;
  std::size_t collection_size = 0;
  std::uint64_t parameter_count = 0;
  double train_error = 0.0;
  double val_error = 0.0;
  std::vector<VarSubset> added;
  double seconds = 0.0;
};

struct SelectionHistory {
  std::vector<RoundRecord> rounds;
  int best_round = 0;
};

struct SelectionResult {
  ThetaModel model;
  SelectionHistory history;
};

/// Candidates S not in the collection with 1 <= |S| <= max_order whose
/// heredity ratio n_S/|S| exceeds tau; tau >= 1 means n_S = |S|.
std::vector<VarSubset> next_available_interactions(const InteractionCollection& collection,
                                                   double tau, const Shape& shape,
                                                   int max_order);

/// Entropies of empirical marginals, cached per subset. Never touches the
/// joint over all variables.
class MarginalSource {
 public:
  explicit MarginalSource(const Dataset& ds) : ds_(&ds) {}
  double entropy(VarSubset s);
  const Dataset& dataset() const { return *ds_; }

 private:
  const Dataset* ds_;
  std::unordered_map<std::uint64_t, double> cache_;
};

/// |J_S| in nats, divided by prod (I_k - 1) when renormalising.
double score_interaction(MarginalSource& source, VarSubset s, bool renormalize);

/// Highest scores first; ties go to smaller |S|, then lexicographic members.
std::vector<VarSubset> top_interactions(const std::map<VarSubset, double>& scores, int k);

/// Error of a model on a dataset: KL(p_emp; q) in nats when log Z is
/// exact, else mean negative log-likelihood under the stored log Z.
double dataset_error(const ThetaModel& model, const Dataset& ds, ErrorMode mode);
double mean_nll(const ThetaModel& model, const Dataset& ds);

SelectionResult mahgenta_fit(const Dataset& train, const Dataset& val,
                             const SelectionConfig& config, std::uint64_t seed);

/// Fixed-collection fit with the same round structure and validation early
/// stopping (the 1D/2D/3D baselines).
SelectionResult fixed_fit(const Dataset& train, const Dataset& val,
                          const InteractionCollection& collection, const SelectionConfig& config,
                          std::uint64_t seed);

}  // namespace mahgenta
