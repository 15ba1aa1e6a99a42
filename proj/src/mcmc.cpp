#include "mahgenta/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mahgenta/error.hpp"

namespace mahgenta {

namespace {

std::vector<std::uint32_t> strides_of(const Shape& shape, VarSubset t) {
  // Stride of every variable of [d] inside a tensor over T (0 when absent).
  std::vector<std::uint32_t> stride(static_cast<std::size_t>(shape.d()), 0);
  std::uint32_t acc = 1;
  for (int k = shape.d(); k-- > 0;) {
    if (t.contains(k)) {
      stride[static_cast<std::size_t>(k)] = acc;
      acc *= static_cast<std::uint32_t>(shape.cardinality(k));
    }
  }
  return stride;
}

int draw_categorical(std::span<const double> probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    acc += probs[j];
    if (u < acc) return static_cast<int>(j);
  }
  // u landed in the rounding gap at the top; take the last positive cell.
  for (std::size_t j = probs.size(); j-- > 0;) {
    if (probs[j] > 0.0) return static_cast<int>(j);
  }
  return 0;
}

void softmax_in_place(std::vector<double>& e) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : e) mx = std::max(mx, v);
  double total = 0.0;
  for (double& v : e) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : e) v /= total;
}

double singleton_log_partition(const ThetaModel& model) {
  double lz = 0.0;
  const Shape& shape = model.shape();
  for (int k = 0; k < shape.d(); ++k) {
    const VarSubset s = VarSubset::of({k});
    if (model.has(s)) {
      const auto v = model.theta(s).values();
      lz += log_sum_exp(v);
    } else {
      lz += std::log(static_cast<double>(shape.cardinality(k)));
    }
  }
  return lz;
}

// Independent draw from the singleton part of the model.
void draw_base(const ThetaModel& model, std::span<int> x, Rng& rng) {
  const Shape& shape = model.shape();
  std::vector<double> probs;
  for (int k = 0; k < shape.d(); ++k) {
    const VarSubset s = VarSubset::of({k});
    const auto n = static_cast<std::size_t>(shape.cardinality(k));
    if (model.has(s)) {
      const auto v = model.theta(s).values();
      probs.assign(v.begin(), v.end());
      softmax_in_place(probs);
    } else {
      probs.assign(n, 1.0 / static_cast<double>(n));
    }
    x[static_cast<std::size_t>(k)] = draw_categorical(probs, rng);
  }
}

double interaction_energy(const ThetaModel& model, std::span<const int> x) {
  double e = 0.0;
  for (VarSubset s : model.subsets()) {
    if (s.size() < 2) continue;
    std::size_t offset = 0;
    for (int k : s.members()) {
      offset = offset * static_cast<std::size_t>(model.shape().cardinality(k)) +
               static_cast<std::size_t>(x[static_cast<std::size_t>(k)]);
    }
    e += model.theta(s)[offset];
  }
  return e;
}

}  // namespace

std::vector<VarSubset> default_block_schedule(const ThetaModel& model, std::uint64_t block_cap) {
  std::vector<VarSubset> blocks;
  VarSubset covered;
  for (VarSubset s : model.subsets()) {
    if (model.shape().cell_count(s) > block_cap) continue;
    blocks.push_back(s);
    covered = covered | s;
  }
  for (int k = 0; k < model.shape().d(); ++k) {
    if (!covered.contains(k)) blocks.push_back(VarSubset::of({k}));
  }
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](VarSubset a, VarSubset b) { return a.size() < b.size(); });
  return blocks;
}

BlockSampler::BlockSampler(const ThetaModel& model, std::vector<VarSubset> blocks,
                           std::uint64_t block_cap)
    : shape_(model.shape()), blocks_(std::move(blocks)) {
  for (VarSubset s : blocks_) {
    if (s.empty() || !s.is_subset_of(shape_.all())) {
      throw DomainError("invalid Gibbs block " + s.to_string());
    }
    if (shape_.cell_count(s) > block_cap) {
      throw CapacityError("Gibbs block " + s.to_string() + " has " +
                          std::to_string(shape_.cell_count(s)) + " joint values, over the cap of " +
                          std::to_string(block_cap));
    }
    Block block;
    block.subset = s;
    block.vars = s.members();
    block.dims = shape_.dims(s);
    const std::size_t cells = static_cast<std::size_t>(shape_.cell_count(s));
    for (VarSubset t : model.subsets()) {
      if ((t & s).empty()) continue;
      const auto stride = strides_of(shape_, t);
      Term term;
      term.theta = &model.theta(t);
      term.scaled = t.size() >= 2;
      for (int k : (t - s).members()) term.outside.emplace_back(k, stride[static_cast<std::size_t>(k)]);
      term.inside.resize(cells);
      std::vector<int> digits(block.vars.size());
      for (std::size_t j = 0; j < cells; ++j) {
        unravel(j, block.dims, digits);
        std::uint32_t off = 0;
        for (std::size_t m = 0; m < block.vars.size(); ++m) {
          off += stride[static_cast<std::size_t>(block.vars[m])] * static_cast<std::uint32_t>(digits[m]);
        }
        term.inside[j] = off;
      }
      block.terms.push_back(std::move(term));
    }
    compiled_.push_back(std::move(block));
  }
}

void BlockSampler::block_conditional(std::size_t b, std::span<const int> assignment,
                                     std::vector<double>& probs) const {
  const Block& block = compiled_.at(b);
  const std::size_t cells = static_cast<std::size_t>(shape_.cell_count(block.subset));
  probs.assign(cells, 0.0);
  for (const Term& term : block.terms) {
    std::size_t base = 0;
    for (const auto& [k, st] : term.outside) {
      base += st * static_cast<std::size_t>(assignment[static_cast<std::size_t>(k)]);
    }
    const double w = term.scaled ? beta_ : 1.0;
    const double* th = term.theta->values().data() + base;
    for (std::size_t j = 0; j < cells; ++j) probs[j] += w * th[term.inside[j]];
  }
  softmax_in_place(probs);
}

void BlockSampler::resample_block(std::size_t b, std::span<int> assignment, Rng& rng) const {
  block_conditional(b, assignment, scratch_);
  const Block& block = compiled_[b];
  std::size_t j = static_cast<std::size_t>(draw_categorical(scratch_, rng));
  for (std::size_t m = block.vars.size(); m-- > 0;) {
    const auto dim = static_cast<std::size_t>(block.dims[m]);
    assignment[static_cast<std::size_t>(block.vars[m])] = static_cast<int>(j % dim);
    j /= dim;
  }
}

void BlockSampler::sweep(std::span<int> assignment, Rng& rng) const {
  for (std::size_t b = 0; b < compiled_.size(); ++b) resample_block(b, assignment, rng);
}

ChainState block_gibbs_sweep(const ThetaModel& model, ChainState state,
                             std::span<const VarSubset> blocks) {
  const Shape& shape = model.shape();
  if (static_cast<int>(state.assignment.size()) != shape.d()) {
    throw DomainError("chain state has the wrong number of variables");
  }
  for (int k = 0; k < shape.d(); ++k) {
    const int v = state.assignment[static_cast<std::size_t>(k)];
    if (v < 0 || v >= shape.cardinality(k)) {
      throw DomainError("chain state out of range for variable " + std::to_string(k + 1));
    }
  }
  BlockSampler sampler(model, std::vector<VarSubset>(blocks.begin(), blocks.end()));
  sampler.sweep(state.assignment, state.rng);
  return state;
}

ProbTensor estimate_eta(std::span<const std::vector<int>> samples, VarSubset s,
                        const Shape& shape) {
  if (samples.empty()) throw DomainError("cannot estimate marginals from zero samples");
  DenseTensor counts = DenseTensor::zeros(shape, s);
  const auto vars = s.members();
  for (const auto& x : samples) {
    std::size_t offset = 0;
    for (int k : vars) {
      offset = offset * static_cast<std::size_t>(shape.cardinality(k)) +
               static_cast<std::size_t>(x[static_cast<std::size_t>(k)]);
    }
    counts[offset] += 1.0;
  }
  return ProbTensor::normalize(std::move(counts));
}

std::vector<std::vector<int>> sample(const ThetaModel& model, std::size_t n, int burn_in,
                                     int thin, std::uint64_t seed) {
  if (burn_in < 0) throw DomainError("burn-in must be non-negative");
  if (thin < 1) throw DomainError("thinning interval must be at least 1");
  Rng rng = make_rng(seed, "gibbs");
  BlockSampler sampler(model);
  std::vector<int> x(static_cast<std::size_t>(model.shape().d()));
  draw_base(model, x, rng);
  for (int i = 0; i < burn_in; ++i) sampler.sweep(x, rng);
  std::vector<std::vector<int>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int t = 0; t < thin; ++t) sampler.sweep(x, rng);
    out.push_back(x);
  }
  return out;
}

std::vector<double> temperature_schedule(int n_temps, TemperatureSchedule kind) {
  if (n_temps < 2) throw DomainError("annealing needs at least 2 temperatures");
  std::vector<double> beta(static_cast<std::size_t>(n_temps));
  const double last = n_temps - 1;
  for (int t = 0; t < n_temps; ++t) {
    if (kind == TemperatureSchedule::uniform) {
      beta[static_cast<std::size_t>(t)] = t / last;
    } else {
      beta[static_cast<std::size_t>(t)] = t == 0 ? 0.0 : std::pow(10.0, -4.0 * (1.0 - t / last));
    }
  }
  beta.back() = 1.0;
  return beta;
}

AisEstimate ais_log_partition(const ThetaModel& model, const AisOptions& options) {
  if (options.n_chains < 1) throw DomainError("AIS needs at least one chain");
  if (options.sweeps_per_temp < 0) throw DomainError("sweeps per temperature must be >= 0");
  AisEstimate est;
  est.n_chains = options.n_chains;
  est.n_temps = options.n_temps;
  est.schedule = temperature_schedule(options.n_temps, options.schedule);
  est.log_z_base = singleton_log_partition(model);

  BlockSampler sampler(model);
  const auto& beta = est.schedule;
  std::vector<int> x(static_cast<std::size_t>(model.shape().d()));
  est.log_weights.resize(static_cast<std::size_t>(options.n_chains));
  for (int c = 0; c < options.n_chains; ++c) {
    Rng rng = make_rng(options.seed, "ais", static_cast<std::uint64_t>(c));
    draw_base(model, x, rng);
    double w = 0.0;
    for (std::size_t t = 1; t < beta.size(); ++t) {
      w += (beta[t] - beta[t - 1]) * interaction_energy(model, x);
      if (t + 1 == beta.size()) break;
      sampler.set_beta(beta[t]);
      for (int s = 0; s < options.sweeps_per_temp; ++s) sampler.sweep(x, rng);
    }
    est.log_weights[static_cast<std::size_t>(c)] = w;
  }

  const auto& lw = est.log_weights;
  const double mx = *std::max_element(lw.begin(), lw.end());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : lw) {
    const double r = std::exp(v - mx);
    sum += r;
    sum_sq += r * r;
  }
  const double n = static_cast<double>(lw.size());
  const double mean = sum / n;
  est.log_z = est.log_z_base + mx + std::log(mean);
  est.ess = sum * sum / sum_sq;
  if (lw.size() > 1) {
    double var = 0.0;
    for (double v : lw) {
      const double r = std::exp(v - mx) - mean;
      var += r * r;
    }
    var /= n - 1.0;
    est.stderr_nats = std::sqrt(var / n) / mean;
  } else {
    est.stderr_nats = std::numeric_limits<double>::infinity();
  }
  est.reliable = est.ess >= 2.0;
  return est;
}

ThetaModel stochastic_fit(ThetaModel model, const EtaVector& data_eta,
                          const StochasticFitOptions& options,
                          std::span<const std::vector<int>> init_rows,
                          std::vector<std::vector<int>>* chains) {
  if (!(options.lr >= 0.0)) throw DomainError("learning rate must be non-negative");
  if (options.n_chains < 1) throw DomainError("stochastic fitting needs at least one chain");
  for (VarSubset s : model.subsets()) {
    if (model.shape().dims(s) != data_eta.at(s).dims()) {
      throw DomainError("target marginal for " + s.to_string() + " has the wrong shape");
    }
  }
  if (options.lr == 0.0 || options.epochs == 0) return model;

  const Shape& shape = model.shape();
  const auto d = static_cast<std::size_t>(shape.d());
  std::vector<std::vector<int>> local;
  std::vector<std::vector<int>>& states = chains != nullptr ? *chains : local;
  Rng init = make_rng(options.seed, "init");
  if (states.size() != static_cast<std::size_t>(options.n_chains)) {
    states.assign(static_cast<std::size_t>(options.n_chains), std::vector<int>(d));
    for (std::size_t c = 0; c < states.size(); ++c) {
      if (!init_rows.empty()) {
        states[c] = init_rows[c % init_rows.size()];
      } else {
        draw_base(model, states[c], init);
      }
    }
  }
  std::vector<Rng> rngs;
  for (std::size_t c = 0; c < states.size(); ++c) rngs.push_back(make_rng(options.seed, "gibbs", c));

  const auto blocks = default_block_schedule(model);
  std::vector<std::vector<int>> pool;
  double smoothed = -1.0;
  double best = std::numeric_limits<double>::infinity();
  int rising = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const BlockSampler sampler(model, blocks);
    pool.clear();
    for (std::size_t c = 0; c < states.size(); ++c) {
      for (int s = 0; s < std::max(1, options.sweeps_per_epoch); ++s) {
        sampler.sweep(states[c], rngs[c]);
        pool.push_back(states[c]);
      }
    }
    double mismatch = 0.0;
    std::vector<DenseTensor> grads;
    for (VarSubset s : model.subsets()) {
      const ProbTensor est = estimate_eta(pool, s, shape);
      DenseTensor g = raw_gradient(est, data_eta.at(s));
      for (double v : g.values()) mismatch = std::max(mismatch, std::abs(v));
      grads.push_back(center_fibers(scale_gradient(g, est.tensor(), options.precondition)));
    }
    const auto& subsets = model.subsets();
    for (std::size_t j = 0; j < subsets.size(); ++j) {
      model.set_theta(subsets[j], center_fibers(model.theta(subsets[j]) - grads[j] * options.lr));
    }

    // Sampling noise makes single-epoch comparisons meaningless; track an
    // exponential average of the moment mismatch instead.
    const double prev = smoothed;
    smoothed = smoothed < 0.0 ? mismatch : 0.7 * smoothed + 0.3 * mismatch;
    best = std::min(best, smoothed);
    rising = (prev >= 0.0 && smoothed > prev) ? rising + 1 : 0;
    if (rising >= options.divergence_patience && smoothed > 2.0 * best) {
      throw StepSizeError("sampled moment mismatch grew for " + std::to_string(rising) +
                          " consecutive epochs; lower the learning rate");
    }
  }
  LogNormalizer z = model.log_normalizer();
  z.status = NormalizerStatus::stale;
  model.set_log_normalizer(z);
  return model;
}

}  // namespace mahgenta
