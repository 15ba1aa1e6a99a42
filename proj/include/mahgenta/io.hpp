#pragma once

#include <string>
#include <vector>

#include "mahgenta/core.hpp"
#include "mahgenta/data.hpp"
#include "mahgenta/info.hpp"
#include "mahgenta/loglinear.hpp"
#include "mahgenta/mcmc.hpp"
#include "mahgenta/selection.hpp"

namespace mahgenta {

inline constexpr int kFormatVersion = 1;

/// Writes to a temporary sibling and renames, so readers never see a
/// partial file.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

struct ModelFile {
  ThetaModel model;
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> labels;
  /// Free-form JSON text (config, seed, dataset hash).
  std::string provenance_json = "{}";
};

std::string model_to_json(const ModelFile& file);
ModelFile model_from_json(const std::string& text);
void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

std::string distribution_to_json(const ProbTensor& p);
ProbTensor distribution_from_json(const std::string& text);

/// {"subsets": [[1], [1, 2], ...]} with 1-based members.
std::string collection_to_json(const InteractionCollection& c);
InteractionCollection collection_from_json(const std::string& text);

/// {"additions": [[1], [2], [1, 2], ...]}: a maximally refined chain.
std::string chain_to_json(const Chain& chain);
Chain chain_from_json(const std::string& text);

std::string report_to_json(const DecompositionReport& report);
std::string ais_to_json(const AisEstimate& est, double exact_log_z, bool have_exact);

std::string history_to_csv(const SelectionHistory& history);
/// One row per sample, category labels.
std::string samples_to_csv(const std::vector<std::vector<int>>& samples,
                           const std::vector<std::string>& names,
                           const std::vector<std::vector<std::string>>& labels);
std::string dataset_to_csv(const Dataset& ds);
/// row id, true label, predicted label, per-class probabilities.
std::string predictions_to_csv(const Classification& c, const Dataset& ds);

/// CSV field with quoting when needed.
std::string csv_field(const std::string& s);

}  // namespace mahgenta
