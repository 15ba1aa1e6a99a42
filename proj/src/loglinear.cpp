#include "mahgenta/loglinear.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "mahgenta/error.hpp"

namespace mahgenta {

namespace {

constexpr std::size_t kSuffixCellLimit = 4096;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

bool is_centered(const DenseTensor& t) {
  if (t.subset().empty()) return true;
  double scale = 1.0;
  for (double v : t.values()) scale = std::max(scale, std::abs(v));
  return center_fibers(t).max_abs_diff(t) <= 1e-9 * scale;
}

}  // namespace

// ---------------------------------------------------------------------------
// ThetaModel

ThetaModel::ThetaModel(Shape shape, const InteractionCollection& collection)
    : shape_(std::move(shape)) {
  for (VarSubset s : collection.insertion_order()) {
    if (!s.is_subset_of(shape_.all())) {
      throw DomainError("interaction " + s.to_string() + " is outside the shape");
    }
    add_interaction(s);
  }
}

const DenseTensor& ThetaModel::theta(VarSubset s) const {
  const auto it = index_.find(s.mask());
  if (it == index_.end()) throw DomainError("model has no interaction " + s.to_string());
  return params_[it->second];
}

void ThetaModel::set_theta(VarSubset s, DenseTensor t) {
  const auto it = index_.find(s.mask());
  if (it == index_.end()) throw DomainError("model has no interaction " + s.to_string());
  if (t.subset() != s || t.dims() != shape_.dims(s)) {
    throw DomainError("parameter tensor layout does not match " + s.to_string());
  }
  if (!is_centered(t)) {
    throw DomainError("parameter tensor for " + s.to_string() +
                      " violates the zero fibre-sum gauge");
  }
  params_[it->second] = std::move(t);
  log_z_.status = NormalizerStatus::stale;
}

void ThetaModel::add_interaction(VarSubset s) {
  if (!s.is_subset_of(shape_.all())) {
    throw DomainError("interaction " + s.to_string() + " is outside the shape");
  }
  collection_.add(s);
  if (s.empty() || index_.count(s.mask()) != 0) return;
  index_.emplace(s.mask(), params_.size());
  subsets_.push_back(s);
  params_.push_back(DenseTensor::zeros(shape_, s));
  log_z_.status = NormalizerStatus::stale;
}

double ThetaModel::energy(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != shape_.d()) {
    throw DomainError("index has " + std::to_string(index.size()) + " coordinates, expected " +
                      std::to_string(shape_.d()));
  }
  for (int k = 0; k < shape_.d(); ++k) {
    if (index[static_cast<std::size_t>(k)] < 0 ||
        index[static_cast<std::size_t>(k)] >= shape_.cardinality(k)) {
      throw DomainError("index out of range for variable " + std::to_string(k + 1));
    }
  }
  double e = 0.0;
  for (std::size_t j = 0; j < subsets_.size(); ++j) {
    std::size_t offset = 0;
    for (int k : subsets_[j].members()) {
      offset = offset * static_cast<std::size_t>(shape_.cardinality(k)) +
               static_cast<std::size_t>(index[static_cast<std::size_t>(k)]);
    }
    e += params_[j][offset];
  }
  return e;
}

std::uint64_t ThetaModel::parameter_count() const {
  std::uint64_t n = 0;
  for (VarSubset s : subsets_) n += shape_.free_parameter_count(s);
  return n;
}

// ---------------------------------------------------------------------------
// EtaVector

const ProbTensor& EtaVector::at(VarSubset s) const {
  const auto it = entries_.find(s);
  if (it == entries_.end()) throw DomainError("no target marginal for " + s.to_string());
  return it->second;
}

EtaVector EtaVector::from_distribution(const ProbTensor& p,
                                       const InteractionCollection& collection) {
  EtaVector eta;
  for (VarSubset s : collection.insertion_order()) {
    if (!s.empty()) eta.set(marginalize(p, s));
  }
  return eta;
}

// ---------------------------------------------------------------------------
// ExactEngine

ExactEngine::ExactEngine(const Shape& shape) : shape_(shape) {
  shape_.require_enumerable(shape_.all(), "exact evaluation");
  cells_ = static_cast<std::size_t>(shape_.event_count());
  split_ = shape_.d() - 1;
  suffix_cells_ = static_cast<std::size_t>(shape_.cardinality(split_));
  while (split_ > 0 &&
         suffix_cells_ * static_cast<std::size_t>(shape_.cardinality(split_ - 1)) <=
             kSuffixCellLimit) {
    --split_;
    suffix_cells_ *= static_cast<std::size_t>(shape_.cardinality(split_));
  }
}

const ExactEngine::Indexer& ExactEngine::indexer(VarSubset s) {
  if (auto it = cache_.find(s.mask()); it != cache_.end()) return it->second;

  // Stride of each variable inside a tensor over S (0 when absent).
  const int d = shape_.d();
  std::vector<std::uint32_t> stride(static_cast<std::size_t>(d), 0);
  std::uint32_t acc = 1;
  for (int k = d; k-- > 0;) {
    if (s.contains(k)) {
      stride[static_cast<std::size_t>(k)] = acc;
      acc *= static_cast<std::uint32_t>(shape_.cardinality(k));
    }
  }
  auto table = [&](int first, int last) {
    std::size_t n = 1;
    for (int k = first; k < last; ++k) n *= static_cast<std::size_t>(shape_.cardinality(k));
    std::vector<std::uint32_t> out(n);
    std::vector<int> digit(static_cast<std::size_t>(last - first), 0);
    std::uint32_t offset = 0;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = offset;
      for (int k = last; k-- > first;) {
        auto& dg = digit[static_cast<std::size_t>(k - first)];
        const auto st = stride[static_cast<std::size_t>(k)];
        if (++dg < shape_.cardinality(k)) {
          offset += st;
          break;
        }
        offset -= st * static_cast<std::uint32_t>(shape_.cardinality(k) - 1);
        dg = 0;
      }
    }
    return out;
  };
  Indexer ix{table(0, split_), table(split_, d)};
  return cache_.emplace(s.mask(), std::move(ix)).first->second;
}

void ExactEngine::add_broadcast(const DenseTensor& t, std::span<double> out) {
  const Indexer& ix = indexer(t.subset());
  const double* th = t.values().data();
  const std::uint32_t* suf = ix.suffix.data();
  const std::size_t ns = suffix_cells_;
  for (std::size_t p = 0; p < ix.prefix.size(); ++p) {
    const double* base = th + ix.prefix[p];
    double* row = out.data() + p * ns;
    for (std::size_t j = 0; j < ns; ++j) row[j] += base[suf[j]];
  }
}

void ExactEngine::energies(const ThetaModel& model, std::vector<double>& out, double beta) {
  if (!(model.shape() == shape_)) throw DomainError("model shape does not match the engine");
  out.assign(cells_, 0.0);
  for (VarSubset s : model.subsets()) {
    if (s.size() >= 2 && beta != 1.0) {
      add_broadcast(model.theta(s) * beta, out);
    } else {
      add_broadcast(model.theta(s), out);
    }
  }
}

DenseTensor ExactEngine::marginal(std::span<const double> full, VarSubset s) {
  DenseTensor m = DenseTensor::zeros(shape_, s);
  const Indexer& ix = indexer(s);
  double* acc = m.values().data();
  const std::uint32_t* suf = ix.suffix.data();
  const std::size_t ns = suffix_cells_;
  for (std::size_t p = 0; p < ix.prefix.size(); ++p) {
    double* base = acc + ix.prefix[p];
    const double* row = full.data() + p * ns;
    for (std::size_t j = 0; j < ns; ++j) base[suf[j]] += row[j];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Normalisation and marginals

double log_sum_exp(std::span<const double> values) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : values) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - mx);
  return mx + std::log(acc);
}

double exact_log_partition(const ThetaModel& model) {
  ExactEngine engine(model.shape());
  std::vector<double> e;
  engine.energies(model, e);
  return log_sum_exp(e);
}

void refresh_exact_normalizer(ThetaModel& model) {
  model.set_log_normalizer({exact_log_partition(model), NormalizerStatus::exact, 0.0});
}

namespace {

void normalize_in_place(std::vector<double>& e, double log_z) {
  for (double& v : e) v = std::exp(v - log_z);
}

ProbTensor full_tensor(const Shape& shape, std::vector<double> q) {
  // Renormalise to absorb rounding so the ProbTensor check is exact.
  double total = 0.0;
  for (double v : q) total += v;
  for (double& v : q) v /= total;
  return ProbTensor(DenseTensor(shape.all(), shape.cardinalities(), std::move(q)));
}

}  // namespace

ProbTensor model_distribution(const ThetaModel& model) {
  ExactEngine engine(model.shape());
  std::vector<double> e;
  engine.energies(model, e);
  normalize_in_place(e, log_sum_exp(e));
  return full_tensor(model.shape(), std::move(e));
}

ProbTensor model_eta(const ThetaModel& model, VarSubset s) {
  if (s.empty()) return ProbTensor(DenseTensor::scalar(1.0));
  ExactEngine engine(model.shape());
  std::vector<double> e;
  engine.energies(model, e);
  normalize_in_place(e, log_sum_exp(e));
  return ProbTensor::normalize(engine.marginal(e, s));
}

DenseTensor raw_gradient(const ProbTensor& model_eta_s, const ProbTensor& data_eta_s) {
  return model_eta_s.tensor() - data_eta_s.tensor();
}

DenseTensor purified_gradient(const ThetaModel& model, const EtaVector& data_eta, VarSubset s) {
  if (!model.has(s)) throw DomainError("model has no interaction " + s.to_string());
  const ProbTensor& target = data_eta.at(s);
  return center_fibers(raw_gradient(model_eta(model, s), target));
}

// ---------------------------------------------------------------------------
// Gradient descent

DenseTensor scale_gradient(const DenseTensor& raw, const DenseTensor& model_eta, Preconditioner p) {
  switch (p) {
    case Preconditioner::none:
      return raw;
    case Preconditioner::cell_count:
      return raw * static_cast<double>(raw.size());
    case Preconditioner::fisher: {
      DenseTensor out = raw;
      for (std::size_t j = 0; j < out.size(); ++j) {
        const double e = model_eta[j];
        const double curv = std::max(e * (1.0 - e), 1e-12);
        out[j] = std::clamp(raw[j] / curv, -kFisherClip, kFisherClip);
      }
      return out;
    }
  }
  return raw;
}

namespace {

struct Evaluation {
  double log_z = 0.0;
  double objective = 0.0;
  double residual = 0.0;
  std::vector<DenseTensor> gradients;  // raw, aligned with model.subsets()
  std::vector<DenseTensor> marginals;
};

class ExactFitter {
 public:
  ExactFitter(const ThetaModel& model, const EtaVector& data_eta, const std::vector<char>* mask)
      : engine_(model.shape()), data_eta_(data_eta), mask_(mask) {
    for (VarSubset s : model.subsets()) {
      const ProbTensor& t = data_eta.at(s);
      if (t.dims() != model.shape().dims(s)) {
        throw DomainError("target marginal for " + s.to_string() + " has the wrong shape");
      }
    }
  }

  Evaluation evaluate(const ThetaModel& model) {
    engine_.energies(model, q_);
    if (mask_ != nullptr) {
      for (std::size_t i = 0; i < q_.size(); ++i) {
        if (!(*mask_)[i]) q_[i] = -std::numeric_limits<double>::infinity();
      }
    }
    Evaluation ev;
    ev.log_z = log_sum_exp(q_);
    normalize_in_place(q_, ev.log_z);
    ev.objective = ev.log_z;
    for (VarSubset s : model.subsets()) {
      const ProbTensor& target = data_eta_.at(s);
      const DenseTensor& th = model.theta(s);
      double dot = 0.0;
      for (std::size_t j = 0; j < th.size(); ++j) dot += target[j] * th[j];
      ev.objective -= dot;
      DenseTensor m = engine_.marginal(q_, s);
      DenseTensor g = m - target.tensor();
      ev.marginals.push_back(std::move(m));
      for (double v : g.values()) ev.residual = std::max(ev.residual, std::abs(v));
      ev.gradients.push_back(std::move(g));
    }
    return ev;
  }

 private:
  ExactEngine engine_;
  const EtaVector& data_eta_;
  const std::vector<char>* mask_;
  std::vector<double> q_;
};

void apply_step(ThetaModel& model, const Evaluation& ev, double lr, Preconditioner precondition) {
  const auto& subsets = model.subsets();
  for (std::size_t j = 0; j < subsets.size(); ++j) {
    const VarSubset s = subsets[j];
    DenseTensor dir = center_fibers(scale_gradient(ev.gradients[j], ev.marginals[j], precondition));
    DenseTensor next = model.theta(s) - dir * lr;
    model.set_theta(s, center_fibers(std::move(next)));
  }
}

GdResult gd_fit_impl(ThetaModel model, const EtaVector& data_eta, const GdOptions& options,
                     const std::vector<char>* mask) {
  if (!(options.lr >= 0.0)) throw DomainError("learning rate must be non-negative");
  if (options.epochs < 0) throw DomainError("epoch count must be non-negative");
  ExactFitter fitter(model, data_eta, mask);

  GdResult result;
  double lr = options.lr;
  Evaluation ev = fitter.evaluate(model);
  int rising = 0;
  double previous = ev.objective;
  ThetaModel accepted = model;
  Evaluation accepted_ev = ev;

  int epoch = 0;
  for (; epoch < options.epochs; ++epoch) {
    if (options.tolerance > 0.0 && accepted_ev.residual < options.tolerance) {
      result.converged = true;
      break;
    }
    if (lr == 0.0) continue;
    model = accepted;
    apply_step(model, accepted_ev, lr, options.precondition);
    ev = fitter.evaluate(model);

    if (options.backtrack) {
      // Rounding noise in the objective is ~1e-15 relative; only a clear rise
      // counts as overshooting.
      const double slack = 1e-12 * std::max(1.0, std::abs(accepted_ev.objective));
      if (!(ev.objective <= accepted_ev.objective + slack)) {
        lr *= 0.5;
        if (lr < 1e-12) break;
        continue;
      }
    } else {
      rising = ev.objective > previous ? rising + 1 : 0;
      previous = ev.objective;
      if (rising >= options.divergence_patience) {
        throw StepSizeError("training objective increased for " +
                            std::to_string(rising) +
                            " consecutive epochs; lower the learning rate (lr=" +
                            sci(options.lr) + ")");
      }
    }
    accepted = model;
    accepted_ev = std::move(ev);
  }
  if (options.tolerance > 0.0 && accepted_ev.residual < options.tolerance) {
    result.converged = true;
  }
  accepted.set_log_normalizer({accepted_ev.log_z, NormalizerStatus::exact, 0.0});
  result.model = std::move(accepted);
  result.epochs_run = epoch;
  result.objective = accepted_ev.objective;
  result.residual = accepted_ev.residual;
  return result;
}

}  // namespace

GdResult gd_fit(ThetaModel model, const EtaVector& data_eta, const GdOptions& options) {
  return gd_fit_impl(std::move(model), data_eta, options, nullptr);
}

ThetaModel gd_fit(ThetaModel model, const EtaVector& data_eta, double lr, int epochs) {
  if (!(lr > 0.0)) throw DomainError("learning rate must be positive");
  GdOptions options;
  options.lr = lr;
  options.epochs = epochs;
  return gd_fit_impl(std::move(model), data_eta, options, nullptr).model;
}

// ---------------------------------------------------------------------------
// Projections

namespace {

void require_projectable(const InteractionCollection& collection, const Shape& shape) {
  if (!is_hierarchical(collection)) {
    throw DomainError("projection needs a hierarchical collection");
  }
  for (VarSubset s : collection.insertion_order()) {
    if (!s.is_subset_of(shape.all())) {
      throw DomainError("interaction " + s.to_string() + " is outside the shape");
    }
  }
  shape.require_enumerable(shape.all(), "projection");
}

}  // namespace

ProbTensor project(const ProbTensor& p, const InteractionCollection& collection,
                   const ProjectOptions& options) {
  const Shape shape = full_shape_of(p.tensor());
  require_projectable(collection, shape);
  if (collection.contains(shape.all())) return p;

  ThetaModel model(shape, collection);
  const EtaVector eta = EtaVector::from_distribution(p, collection);

  // Cells where some target marginal vanishes carry no mass in the
  // projection; fitting runs on the remaining support.
  std::vector<char> support(p.size(), 1);
  bool any_zero = false;
  for (VarSubset s : model.subsets()) {
    const ProbTensor& m = eta.at(s);
    const auto map = projection_map(shape.all(), shape.cardinalities(), s);
    for (std::size_t i = 0; i < map.size(); ++i) {
      if (m[map[i]] <= 0.0) {
        support[i] = 0;
        any_zero = true;
      }
    }
  }

  GdOptions gd;
  gd.lr = 0.5;
  gd.epochs = options.max_epochs;
  gd.tolerance = options.tolerance;
  gd.precondition = Preconditioner::cell_count;
  gd.backtrack = true;
  GdResult fit = gd_fit_impl(std::move(model), eta, gd, any_zero ? &support : nullptr);
  if (!fit.converged) {
    throw ConvergenceError("projection did not reach marginal tolerance " + sci(options.tolerance) +
                               " (residual " + sci(fit.residual) + ")",
                           fit.residual);
  }

  ExactEngine engine(shape);
  std::vector<double> e;
  engine.energies(fit.model, e);
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!support[i]) e[i] = -std::numeric_limits<double>::infinity();
  }
  normalize_in_place(e, log_sum_exp(e));
  return full_tensor(shape, std::move(e));
}

ProbTensor ipf_project(const ProbTensor& p, const InteractionCollection& collection,
                       double tolerance, int max_cycles) {
  const Shape shape = full_shape_of(p.tensor());
  require_projectable(collection, shape);

  // Fitting the maximal members fixes every marginal below them.
  std::vector<VarSubset> maximal;
  for (VarSubset s : collection.sorted()) {
    bool covered = false;
    for (VarSubset t : collection.insertion_order()) {
      if (t != s && s.is_subset_of(t)) {
        covered = true;
        break;
      }
    }
    if (!covered && !s.empty()) maximal.push_back(s);
  }

  struct Factor {
    VarSubset subset;
    std::vector<std::size_t> map;
    std::vector<double> target;
  };
  std::vector<Factor> factors;
  for (VarSubset s : maximal) {
    const ProbTensor m = marginalize(p, s);
    factors.push_back({s, projection_map(shape.all(), shape.cardinalities(), s),
                       std::vector<double>(m.values().begin(), m.values().end())});
  }

  std::vector<double> q(p.size(), 1.0 / static_cast<double>(p.size()));
  std::vector<double> current;
  auto marginal_of = [&](const Factor& f) {
    current.assign(f.target.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) current[f.map[i]] += q[i];
  };

  double residual = 0.0;
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    for (const Factor& f : factors) {
      marginal_of(f);
      std::vector<double> ratio(f.target.size(), 0.0);
      for (std::size_t j = 0; j < ratio.size(); ++j) {
        if (current[j] > 0.0) {
          ratio[j] = f.target[j] / current[j];
        } else if (f.target[j] > 0.0) {
          throw DomainError("IPF hit a zero cell in " + f.subset.to_string() +
                            " where the target marginal is positive");
        }
      }
      for (std::size_t i = 0; i < q.size(); ++i) q[i] *= ratio[f.map[i]];
    }
    residual = 0.0;
    for (const Factor& f : factors) {
      marginal_of(f);
      for (std::size_t j = 0; j < current.size(); ++j) {
        residual = std::max(residual, std::abs(current[j] - f.target[j]));
      }
    }
    if (residual < tolerance) return full_tensor(shape, std::move(q));
  }
  throw ConvergenceError("IPF did not reach tolerance " + sci(tolerance) + " (residual " +
                             sci(residual) + ")",
                         residual);
}

}  // namespace mahgenta
