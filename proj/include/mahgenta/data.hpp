#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mahgenta/core.hpp"
#include "mahgenta/loglinear.hpp"

namespace mahgenta {

enum class SplitTag : std::uint8_t { none, train, val, test };

/// n x d matrix of category codes with per-column label maps.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Shape shape, std::vector<std::string> names, std::vector<std::vector<std::string>> labels,
          std::vector<int> codes);

  const Shape& shape() const { return shape_; }
  std::size_t n() const { return n_; }
  int d() const { return shape_.d(); }
  std::span<const int> row(std::size_t i) const {
    return {codes_.data() + i * static_cast<std::size_t>(d()), static_cast<std::size_t>(d())};
  }
  int code(std::size_t i, int k) const { return codes_[i * static_cast<std::size_t>(d()) + static_cast<std::size_t>(k)]; }
  const std::vector<int>& codes() const { return codes_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::vector<std::string>>& labels() const { return labels_; }
  const std::vector<SplitTag>& tags() const { return tags_; }
  void set_tags(std::vector<SplitTag> tags);

  std::vector<std::vector<int>> rows() const;
  /// Rows carrying `tag`, same shape and labels, no tags.
  Dataset subset(SplitTag tag) const;
  /// Keeps the listed 0-based columns in the given order.
  Dataset select_columns(std::span<const int> columns) const;
  /// FNV-1a over shape and codes; used for provenance.
  std::uint64_t hash() const;

 private:
  Shape shape_;
  std::size_t n_ = 0;
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> labels_;
  std::vector<int> codes_;
  std::vector<SplitTag> tags_;
};

/// What to do with a column that holds a single category.
enum class DegeneratePolicy { error, pad };

struct CsvOptions {
  bool header = true;
  DegeneratePolicy degenerate = DegeneratePolicy::error;
  /// Placeholder label added under DegeneratePolicy::pad.
  std::string pad_label = "<unobserved>";
};

inline const std::string kMissingLabel = "?";

/// RFC-4180 style reader. Codes follow first appearance; empty fields and
/// "?" become the "?" category.
Dataset load_csv(const std::string& path, const CsvOptions& options = {});
Dataset parse_csv(const std::string& text, const CsvOptions& options = {});

/// Encodes a CSV against existing label maps (e.g. a saved model's). The
/// header must name the same columns; unknown labels are a parse error.
Dataset parse_csv_with_labels(const std::string& text, const std::vector<std::string>& names,
                              const std::vector<std::vector<std::string>>& labels);
Dataset load_csv_with_labels(const std::string& path, const std::vector<std::string>& names,
                             const std::vector<std::vector<std::string>>& labels);

/// Half of the rows go to test; of the rest, floor(70%) train and the
/// remainder validation.
Dataset split(const Dataset& ds, std::uint64_t seed);

struct SplitCounts {
  std::size_t test = 0, train = 0, val = 0;
};
SplitCounts split_counts(std::size_t n);

/// (count + smoothing) / (n + smoothing |I_S|) over all rows.
ProbTensor empirical_marginal(const Dataset& ds, VarSubset s, double smoothing = 0.0);
EtaVector empirical_eta(const Dataset& ds, const InteractionCollection& collection,
                        double smoothing = 0.0);

/// Plug-in entropy of the full empirical joint (nats), without enumerating
/// the event space.
double empirical_joint_entropy(const Dataset& ds);

struct SyntheticSpec {
  Shape shape;
  InteractionCollection collection;
  double sigma = 1.0;
  std::uint64_t seed = 0;
};

enum class Complexity { low, med, high };

/// The three ground-truth collections over four variables.
InteractionCollection complexity_collection(Complexity c);
SyntheticSpec complexity_preset(Complexity c, std::uint64_t seed);

inline constexpr std::array<int, 11> kSampleSizes = {10,   20,   40,   80,   160, 320,
                                                     640, 1280, 2560, 5120, 10240};

struct SyntheticDraw {
  ThetaModel truth_model;
  ProbTensor truth;
  Dataset data;
};

ThetaModel synth_truth(const SyntheticSpec& spec);
SyntheticDraw synth_generate(const SyntheticSpec& spec, std::size_t n);
/// n i.i.d. rows from an explicit distribution over the full space.
Dataset sample_rows(const ProbTensor& p, std::size_t n, std::uint64_t seed);

struct Classification {
  int target = 0;
  double accuracy = 0.0;
  std::vector<int> predicted;
  /// n x I_target conditional probabilities.
  std::vector<double> probabilities;
};

/// Predicts column `target` (0-based) by argmax of q(i_k | i_{-k}); ties go
/// to the lowest code.
Classification classify(const ThetaModel& model, const Dataset& ds, int target);

}  // namespace mahgenta
