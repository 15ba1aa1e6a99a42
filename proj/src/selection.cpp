#include "mahgenta/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>

#include "mahgenta/error.hpp"
#include "mahgenta/info.hpp"

namespace mahgenta {

std::vector<VarSubset> next_available_interactions(const InteractionCollection& collection,
                                                   double tau, const Shape& shape,
                                                   int max_order) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("tau must lie in [0, 1]");
  // Any admissible S has n_S >= 1, so it extends some member by one variable.
  std::set<VarSubset> seen;
  std::vector<VarSubset> out;
  for (VarSubset t : collection.insertion_order()) {
    if (t.size() + 1 > max_order) continue;
    for (int k = 0; k < shape.d(); ++k) {
      if (t.contains(k)) continue;
      const VarSubset s = t.with(k);
      if (collection.contains(s) || !seen.insert(s).second) continue;
      const int n = heredity_count(s, collection);
      const bool ok = tau >= 1.0 ? n == s.size()
                                 : static_cast<double>(n) / static_cast<double>(s.size()) > tau;
      if (ok) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double MarginalSource::entropy(VarSubset s) {
  if (s.empty()) return 0.0;
  if (auto it = cache_.find(s.mask()); it != cache_.end()) return it->second;
  const ProbTensor m = empirical_marginal(*ds_, s);
  double h = 0.0;
  for (double v : m.values()) {
    if (v > 0.0) h -= v * std::log(v);
  }
  cache_.emplace(s.mask(), h);
  return h;
}

double score_interaction(MarginalSource& source, VarSubset s, bool renormalize) {
  const Shape& shape = source.dataset().shape();
  double j = 0.0;
  for (VarSubset t : subsets_of(s)) {
    if (t.empty()) continue;
    const double kl = std::log(static_cast<double>(shape.cell_count(t))) - source.entropy(t);
    j += ((s.size() - t.size()) % 2 == 0 ? 1.0 : -1.0) * kl;
  }
  double score = std::abs(j);
  if (renormalize) score /= static_cast<double>(shape.free_parameter_count(s));
  return score;
}

std::vector<VarSubset> top_interactions(const std::map<VarSubset, double>& scores, int k) {
  std::vector<std::pair<VarSubset, double>> v(scores.begin(), scores.end());
  // std::map already holds canonical order, so a stable sort on the score
  // alone keeps the tie-break.
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<VarSubset> out;
  for (std::size_t i = 0; i < v.size() && static_cast<int>(i) < k; ++i) out.push_back(v[i].first);
  return out;
}

double mean_nll(const ThetaModel& model, const Dataset& ds) {
  if (ds.n() == 0) throw DomainError("error of a model on an empty dataset");
  if (model.log_normalizer().status == NormalizerStatus::stale) {
    throw DomainError("model log-normaliser is stale");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) total += model.energy(ds.row(i));
  return model.log_normalizer().value - total / static_cast<double>(ds.n());
}

double dataset_error(const ThetaModel& model, const Dataset& ds, ErrorMode mode) {
  const double nll = mean_nll(model, ds);
  return mode == ErrorMode::exact_kl ? nll - empirical_joint_entropy(ds) : nll;
}

namespace {

void validate(const Dataset& train, const Dataset& val, const SelectionConfig& config) {
  if (train.n() == 0) throw DomainError("training set is empty");
  if (val.n() == 0) throw DomainError("validation set is empty");
  if (!(train.shape() == val.shape())) throw DomainError("train and validation shapes differ");
  if (config.k < 1) throw DomainError("k must be at least 1");
  if (!(config.lr > 0.0)) throw DomainError("learning rate must be positive");
  if (config.epochs_per_round < 0) throw DomainError("epochs per round must be non-negative");
  if (config.error_mode == ErrorMode::exact_kl) {
    train.shape().require_enumerable(train.shape().all(), "exact KL error mode");
  }
}

// One fitting/evaluation context shared by the selection loop and the
// fixed-collection baselines.
class Trainer {
 public:
  Trainer(const Dataset& train, const Dataset& val, const SelectionConfig& config,
          std::uint64_t seed)
      : train_(train), val_(val), config_(config), seed_(seed), rows_(train.rows()) {
    if (config.error_mode == ErrorMode::exact_kl) {
      h_train_ = empirical_joint_entropy(train);
      h_val_ = empirical_joint_entropy(val);
    }
  }

  void fit(ThetaModel& model, int round) {
    EtaVector eta;
    for (VarSubset s : model.subsets()) {
      auto it = eta_cache_.find(s.mask());
      if (it == eta_cache_.end()) it = eta_cache_.emplace(s.mask(), empirical_marginal(train_, s)).first;
      eta.set(it->second);
    }
    if (config_.error_mode == ErrorMode::exact_kl) {
      GdOptions gd;
      gd.lr = config_.lr;
      gd.epochs = config_.epochs_per_round;
      gd.precondition = config_.precondition;
      gd.backtrack = config_.backtrack;
      model = gd_fit(std::move(model), eta, gd).model;
    } else {
      StochasticFitOptions so;
      so.lr = config_.lr;
      so.epochs = config_.epochs_per_round;
      so.n_chains = config_.n_chains;
      so.sweeps_per_epoch = config_.sweeps_per_epoch;
      so.precondition = config_.precondition;
      so.seed = substream_seed(seed_, "gibbs", static_cast<std::uint64_t>(round));
      model = stochastic_fit(std::move(model), eta, so, rows_, &chains_);
      refresh_normalizer(model, round);
    }
  }

  void refresh_normalizer(ThetaModel& model, int round) {
    if (config_.error_mode == ErrorMode::exact_kl) {
      refresh_exact_normalizer(model);
      return;
    }
    AisOptions ais = config_.ais;
    ais.seed = substream_seed(seed_, "ais", static_cast<std::uint64_t>(round));
    const AisEstimate est = ais_log_partition(model, ais);
    model.set_log_normalizer({est.log_z, NormalizerStatus::estimated, est.stderr_nats});
  }

  std::pair<double, double> errors(const ThetaModel& model) const {
    if (config_.error_mode == ErrorMode::exact_kl) {
      return {mean_nll(model, train_) - h_train_, mean_nll(model, val_) - h_val_};
    }
    return {mean_nll(model, train_), mean_nll(model, val_)};
  }

 private:
  const Dataset& train_;
  const Dataset& val_;
  const SelectionConfig& config_;
  std::uint64_t seed_;
  std::vector<std::vector<int>> rows_;
  std::vector<std::vector<int>> chains_;
  std::unordered_map<std::uint64_t, ProbTensor> eta_cache_;
  double h_train_ = 0.0;
  double h_val_ = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared round loop. `grow` adds the round's subsets to the model and
// returns them; an empty return ends the run.
template <class Grow>
SelectionResult run_rounds(ThetaModel model, Trainer& trainer, const SelectionConfig& config,
                           Grow grow) {
  SelectionResult result;
  auto t0 = std::chrono::steady_clock::now();
  trainer.refresh_normalizer(model, 0);
  auto [train_err, val_err] = trainer.errors(model);
  result.history.rounds.push_back(
      {0, model.collection().size(), model.parameter_count(), train_err, val_err, {}, seconds_since(t0)});
  if (config.on_round) config.on_round(result.history.rounds.back());
  double best = val_err;
  result.model = model;
  std::optional<int> extra;

  for (int round = 1; round <= config.max_rounds; ++round) {
    t0 = std::chrono::steady_clock::now();
    std::vector<VarSubset> added = grow(model);
    // Fixed collections never grow; they just keep training.
    if (added.empty() && !grow.fixed()) break;
    trainer.fit(model, round);
    std::tie(train_err, val_err) = trainer.errors(model);
    result.history.rounds.push_back({round, model.collection().size(), model.parameter_count(),
                                     train_err, val_err, added, seconds_since(t0)});
    if (config.on_round) config.on_round(result.history.rounds.back());
    if (!extra) {
      if (val_err < best) {
        best = val_err;
        result.model = model;
        result.history.best_round = round;
        continue;
      }
      extra = config.extra_rounds;
    }
    if ((*extra)-- <= 0) break;
  }
  return result;
}

struct SelectionGrow {
  const SelectionConfig& config;
  MarginalSource& source;
  bool fixed() const { return false; }
  std::vector<VarSubset> operator()(ThetaModel& model) {
    const auto candidates =
        next_available_interactions(model.collection(), config.tau, model.shape(), config.max_order);
    std::map<VarSubset, double> scores;
    for (VarSubset s : candidates) scores.emplace(s, score_interaction(source, s, config.renormalize_score));
    const auto top = top_interactions(scores, config.k);
    for (VarSubset s : top) model.add_interaction(s);
    return top;
  }
};

struct FixedGrow {
  bool fixed() const { return true; }
  std::vector<VarSubset> operator()(ThetaModel&) { return {}; }
};

}  // namespace

SelectionResult mahgenta_fit(const Dataset& train, const Dataset& val,
                             const SelectionConfig& config, std::uint64_t seed) {
  validate(train, val, config);
  Trainer trainer(train, val, config, seed);
  MarginalSource source(train);
  ThetaModel model(train.shape(), InteractionCollection{});
  return run_rounds(std::move(model), trainer, config, SelectionGrow{config, source});
}

SelectionResult fixed_fit(const Dataset& train, const Dataset& val,
                          const InteractionCollection& collection, const SelectionConfig& config,
                          std::uint64_t seed) {
  validate(train, val, config);
  Trainer trainer(train, val, config, seed);
  ThetaModel model(train.shape(), collection);
  return run_rounds(std::move(model), trainer, config, FixedGrow{});
}

}  // namespace mahgenta
