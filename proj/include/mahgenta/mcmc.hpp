#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mahgenta/core.hpp"
#include "mahgenta/loglinear.hpp"
#include "mahgenta/rng.hpp"

namespace mahgenta {

inline constexpr std::uint64_t kDefaultBlockCap = 4096;

struct ChainState {
  std::vector<int> assignment;
  Rng rng;
};

/// Block schedule: collection members in insertion order, stable-sorted so
/// larger interactions come last, plus a singleton for any variable no
/// member covers. Members over `block_cap` cells are skipped.
std::vector<VarSubset> default_block_schedule(const ThetaModel& model,
                                              std::uint64_t block_cap = kDefaultBlockCap);

/// Exact conditional draws of whole blocks of variables.
/// Non-singleton interactions are scaled by an inverse temperature `beta`
/// (1 = the model itself), which is how the annealing path is realised.
class BlockSampler {
 public:
  BlockSampler(const ThetaModel& model, std::vector<VarSubset> blocks,
               std::uint64_t block_cap = kDefaultBlockCap);
  explicit BlockSampler(const ThetaModel& model) : BlockSampler(model, default_block_schedule(model)) {}

  const std::vector<VarSubset>& blocks() const { return blocks_; }
  void set_beta(double beta) { beta_ = beta; }
  double beta() const { return beta_; }

  /// q(i_S | i_{-S}) for block b, flattened over I_S.
  void block_conditional(std::size_t b, std::span<const int> assignment,
                         std::vector<double>& probs) const;
  void resample_block(std::size_t b, std::span<int> assignment, Rng& rng) const;
  void sweep(std::span<int> assignment, Rng& rng) const;

 private:
  struct Term {
    const DenseTensor* theta;
    bool scaled;                       // |T| >= 2
    std::vector<std::pair<int, std::uint32_t>> outside;  // (variable, stride) for T - S
    std::vector<std::uint32_t> inside;                    // offset per block cell
  };
  struct Block {
    VarSubset subset;
    std::vector<int> vars;
    std::vector<int> dims;
    std::vector<Term> terms;
  };

  Shape shape_;
  std::vector<VarSubset> blocks_;
  std::vector<Block> compiled_;
  double beta_ = 1.0;
  mutable std::vector<double> scratch_;
};

ChainState block_gibbs_sweep(const ThetaModel& model, ChainState state,
                             std::span<const VarSubset> blocks);

/// Empirical frequencies of the samples on S. Throws on an empty list.
ProbTensor estimate_eta(std::span<const std::vector<int>> samples, VarSubset s,
                        const Shape& shape);

/// `n` draws after `burn_in` sweeps, keeping every `thin`-th sweep.
/// The chain starts from a draw of the singleton part of the model.
std::vector<std::vector<int>> sample(const ThetaModel& model, std::size_t n, int burn_in,
                                     int thin, std::uint64_t seed);

enum class TemperatureSchedule { uniform, geometric };

struct AisOptions {
  int n_chains = 256;
  int n_temps = 200;
  int sweeps_per_temp = 1;
  TemperatureSchedule schedule = TemperatureSchedule::uniform;
  std::uint64_t seed = 0;
};

struct AisEstimate {
  double log_z = 0.0;
  double stderr_nats = 0.0;
  int n_chains = 0;
  int n_temps = 0;
  std::vector<double> schedule;
  double log_z_base = 0.0;
  double ess = 0.0;
  bool reliable = true;
  std::vector<double> log_weights;
};

std::vector<double> temperature_schedule(int n_temps, TemperatureSchedule kind);

/// Annealed importance sampling from the singleton restriction of the model.
AisEstimate ais_log_partition(const ThetaModel& model, const AisOptions& options = {});

struct StochasticFitOptions {
  double lr = 0.5;
  int epochs = 10;
  int n_chains = 256;
  int sweeps_per_epoch = 1;
  Preconditioner precondition = Preconditioner::none;
  int divergence_patience = 5;
  std::uint64_t seed = 0;
};

/// Persistent-chain fitting where exact marginals are unaffordable.
/// Chains start from rows of `init_rows` (cycled) when given. Chain states
/// are carried in `chains` across calls when non-null.
ThetaModel stochastic_fit(ThetaModel model, const EtaVector& data_eta,
                          const StochasticFitOptions& options,
                          std::span<const std::vector<int>> init_rows = {},
                          std::vector<std::vector<int>>* chains = nullptr);

}  // namespace mahgenta
