#include "mahgenta/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "json.hpp"
#include "mahgenta/error.hpp"

namespace mahgenta {

using nlohmann::json;

namespace {

json subset_json(VarSubset s) { return s.members_one_based(); }

VarSubset subset_from(const json& j) {
  const auto members = j.get<std::vector<int>>();
  return VarSubset::of_one_based(members);
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

void check_header(const json& j, const char* kind, bool version_required = true) {
  if (!j.is_object()) throw ParseError(std::string(kind) + " file must hold a JSON object");
  if (!version_required && !j.contains("format_version")) return;
  if (!j.contains("format_version")) {
    throw ParseError(std::string(kind) + " file lacks a format_version");
  }
  const int v = j.at("format_version").get<int>();
  if (v != kFormatVersion) {
    throw ParseError(std::string(kind) + " file has format_version " + std::to_string(v) +
                     ", expected " + std::to_string(kFormatVersion));
  }
  if (j.contains("kind") && j.at("kind") != kind) {
    throw ParseError("expected a " + std::string(kind) + " file, found " +
                     j.at("kind").get<std::string>());
  }
}

const char* status_name(NormalizerStatus s) {
  switch (s) {
    case NormalizerStatus::exact:
      return "exact";
    case NormalizerStatus::estimated:
      return "estimated";
    case NormalizerStatus::stale:
      return "stale";
  }
  return "stale";
}

NormalizerStatus status_from(const std::string& s) {
  if (s == "exact") return NormalizerStatus::exact;
  if (s == "estimated") return NormalizerStatus::estimated;
  if (s == "stale") return NormalizerStatus::stale;
  throw ParseError("unknown log-normaliser status '" + s + "'");
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << contents;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw IoError("write to " + tmp + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw IoError("cannot move output into place at " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------
// Models

std::string model_to_json(const ModelFile& file) {
  const ThetaModel& m = file.model;
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "model";
  j["cardinalities"] = m.shape().cardinalities();
  j["names"] = file.names;
  j["labels"] = file.labels;
  json inter = json::array();
  for (VarSubset s : m.collection().sorted()) {
    if (s.empty()) continue;
    const auto v = m.theta(s).values();
    inter.push_back({{"subset", subset_json(s)}, {"theta", std::vector<double>(v.begin(), v.end())}});
  }
  j["interactions"] = std::move(inter);
  const LogNormalizer& z = m.log_normalizer();
  j["log_normalizer"] = {{"value", z.value}, {"status", status_name(z.status)}, {"stderr", z.stderr_nats}};
  j["provenance"] = parse_json(file.provenance_json, "provenance");
  return j.dump(1) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  const json j = parse_json(text, "model file");
  check_header(j, "model");
  try {
    ModelFile file;
    Shape shape(j.at("cardinalities").get<std::vector<int>>());
    InteractionCollection c;
    for (const auto& e : j.at("interactions")) c.add(subset_from(e.at("subset")));
    ThetaModel m(shape, c);
    for (const auto& e : j.at("interactions")) {
      const VarSubset s = subset_from(e.at("subset"));
      m.set_theta(s, DenseTensor(s, shape.dims(s), e.at("theta").get<std::vector<double>>()));
    }
    const auto& z = j.at("log_normalizer");
    m.set_log_normalizer({z.at("value").get<double>(), status_from(z.at("status").get<std::string>()),
                          z.value("stderr", 0.0)});
    file.model = std::move(m);
    if (j.contains("names")) file.names = j.at("names").get<std::vector<std::string>>();
    if (j.contains("labels")) file.labels = j.at("labels").get<std::vector<std::vector<std::string>>>();
    if (file.names.empty()) {
      for (int k = 0; k < shape.d(); ++k) file.names.push_back("x" + std::to_string(k + 1));
    }
    if (file.labels.empty()) {
      for (int k = 0; k < shape.d(); ++k) {
        std::vector<std::string> l;
        for (int c2 = 0; c2 < shape.cardinality(k); ++c2) l.push_back(std::to_string(c2));
        file.labels.push_back(std::move(l));
      }
    }
    file.provenance_json = j.value("provenance", json::object()).dump();
    return file;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::string& path, const ModelFile& file) {
  write_file_atomic(path, model_to_json(file));
}

ModelFile load_model(const std::string& path) { return model_from_json(read_file(path)); }

// ---------------------------------------------------------------------------
// Distributions, collections, chains

std::string distribution_to_json(const ProbTensor& p) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "distribution";
  j["cardinalities"] = p.dims();
  j["values"] = std::vector<double>(p.values().begin(), p.values().end());
  return j.dump(1) + "\n";
}

ProbTensor distribution_from_json(const std::string& text) {
  const json j = parse_json(text, "distribution file");
  check_header(j, "distribution");
  try {
    Shape shape(j.at("cardinalities").get<std::vector<int>>());
    return ProbTensor(DenseTensor(shape.all(), shape.cardinalities(),
                                  j.at("values").get<std::vector<double>>()));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed distribution file: ") + e.what());
  }
}

std::string collection_to_json(const InteractionCollection& c) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "collection";
  json subs = json::array();
  for (VarSubset s : c.sorted()) {
    if (!s.empty()) subs.push_back(subset_json(s));
  }
  j["subsets"] = std::move(subs);
  return j.dump(1) + "\n";
}

InteractionCollection collection_from_json(const std::string& text) {
  const json j = parse_json(text, "collection file");
  // Hand-written collection and chain files may omit the header.
  check_header(j, "collection", false);
  try {
    InteractionCollection c;
    for (const auto& e : j.at("subsets")) c.add(subset_from(e));
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed collection file: ") + e.what());
  }
}

std::string chain_to_json(const Chain& chain) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "chain";
  json add = json::array();
  for (VarSubset s : chain.added_subsets()) add.push_back(subset_json(s));
  j["additions"] = std::move(add);
  return j.dump(1) + "\n";
}

Chain chain_from_json(const std::string& text) {
  const json j = parse_json(text, "chain file");
  check_header(j, "chain", false);
  try {
    std::vector<VarSubset> add;
    for (const auto& e : j.at("additions")) add.push_back(subset_from(e));
    return Chain::from_additions(add);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed chain file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

std::string report_to_json(const DecompositionReport& report) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "decomposition";
  j["total_kl_nats"] = report.total_kl;
  j["total_kl_bits"] = to_unit(report.total_kl, Unit::bits);
  j["residual_nats"] = report.residual();
  json steps = json::array();
  double cum = 0.0;
  for (const auto& s : report.steps) {
    cum += s.nats;
    steps.push_back({{"subset", subset_json(s.subset)},
                     {"nats", s.nats},
                     {"bits", s.bits},
                     {"cumulative_fraction", report.total_kl > 0.0 ? cum / report.total_kl : 0.0}});
  }
  j["steps"] = std::move(steps);
  return j.dump(1) + "\n";
}

std::string ais_to_json(const AisEstimate& est, double exact_log_z, bool have_exact) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "log_partition";
  j["method"] = "ais";
  j["log_z"] = est.log_z;
  j["stderr"] = est.stderr_nats;
  j["n_chains"] = est.n_chains;
  j["n_temps"] = est.n_temps;
  j["log_z_base"] = est.log_z_base;
  j["ess"] = est.ess;
  j["reliable"] = est.reliable;
  j["schedule"] = est.schedule;
  if (have_exact) j["exact_log_z"] = exact_log_z;
  return j.dump(1) + "\n";
}

// ---------------------------------------------------------------------------
// CSV outputs

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

std::string subsets_field(const std::vector<VarSubset>& subsets) {
  std::string out;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    if (i) out += ';';
    out += subsets[i].to_string();
  }
  return csv_field(out);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string history_to_csv(const SelectionHistory& history) {
  std::string out = "round,collection_size,parameter_count,train_error,val_error,best,seconds,added\n";
  for (const auto& r : history.rounds) {
    out += std::to_string(r.round) + ',' + std::to_string(r.collection_size) + ',' +
           std::to_string(r.parameter_count) + ',' + num(r.train_error) + ',' + num(r.val_error) +
           ',' + (r.round == history.best_round ? "1" : "0") + ',' + num(r.seconds) + ',' +
           subsets_field(r.added) + '\n';
  }
  return out;
}

std::string samples_to_csv(const std::vector<std::vector<int>>& samples,
                           const std::vector<std::string>& names,
                           const std::vector<std::vector<std::string>>& labels) {
  std::string out;
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (k) out += ',';
    out += csv_field(names[k]);
  }
  out += '\n';
  for (const auto& x : samples) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (k) out += ',';
      out += csv_field(labels[k][static_cast<std::size_t>(x[k])]);
    }
    out += '\n';
  }
  return out;
}

std::string dataset_to_csv(const Dataset& ds) {
  return samples_to_csv(ds.rows(), ds.names(), ds.labels());
}

std::string predictions_to_csv(const Classification& c, const Dataset& ds) {
  const auto& labels = ds.labels()[static_cast<std::size_t>(c.target)];
  std::string out = "row,true,predicted";
  for (const auto& l : labels) out += ',' + csv_field("p_" + l);
  out += '\n';
  const std::size_t classes = labels.size();
  for (std::size_t i = 0; i < ds.n(); ++i) {
    out += std::to_string(i + 1) + ',' +
           csv_field(labels[static_cast<std::size_t>(ds.code(i, c.target))]) + ',' +
           csv_field(labels[static_cast<std::size_t>(c.predicted[i])]);
    for (std::size_t k = 0; k < classes; ++k) out += ',' + num(c.probabilities[i * classes + k]);
    out += '\n';
  }
  return out;
}

}  // namespace mahgenta
