#include "mahgenta/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "mahgenta/error.hpp"
#include "mahgenta/rng.hpp"

namespace mahgenta {

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Shape shape, std::vector<std::string> names,
                 std::vector<std::vector<std::string>> labels, std::vector<int> codes)
    : shape_(std::move(shape)), names_(std::move(names)), labels_(std::move(labels)),
      codes_(std::move(codes)) {
  const auto d = static_cast<std::size_t>(shape_.d());
  if (names_.size() != d || labels_.size() != d) {
    throw DomainError("dataset needs one name and one label list per column");
  }
  for (std::size_t k = 0; k < d; ++k) {
    if (static_cast<int>(labels_[k].size()) != shape_.cardinality(static_cast<int>(k))) {
      throw DomainError("column " + names_[k] + " has " + std::to_string(labels_[k].size()) +
                        " labels but cardinality " +
                        std::to_string(shape_.cardinality(static_cast<int>(k))));
    }
  }
  if (codes_.size() % d != 0) throw DomainError("code matrix is not rectangular");
  n_ = codes_.size() / d;
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    const int k = static_cast<int>(i % d);
    if (codes_[i] < 0 || codes_[i] >= shape_.cardinality(k)) {
      throw DomainError("code out of range in row " + std::to_string(i / d + 1) + ", column " +
                        names_[static_cast<std::size_t>(k)]);
    }
  }
}

void Dataset::set_tags(std::vector<SplitTag> tags) {
  if (!tags.empty() && tags.size() != n_) throw DomainError("one split tag per row is required");
  tags_ = std::move(tags);
}

std::vector<std::vector<int>> Dataset::rows() const {
  std::vector<std::vector<int>> out;
  out.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto r = row(i);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

Dataset Dataset::subset(SplitTag tag) const {
  if (tags_.empty()) throw DomainError("dataset has not been split");
  std::vector<int> codes;
  for (std::size_t i = 0; i < n_; ++i) {
    if (tags_[i] != tag) continue;
    const auto r = row(i);
    codes.insert(codes.end(), r.begin(), r.end());
  }
  return Dataset(shape_, names_, labels_, std::move(codes));
}

Dataset Dataset::select_columns(std::span<const int> columns) const {
  std::vector<int> cards;
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> labels;
  for (int k : columns) {
    if (k < 0 || k >= d()) throw DomainError("column index " + std::to_string(k + 1) + " out of range");
    cards.push_back(shape_.cardinality(k));
    names.push_back(names_[static_cast<std::size_t>(k)]);
    labels.push_back(labels_[static_cast<std::size_t>(k)]);
  }
  std::vector<int> codes;
  codes.reserve(n_ * columns.size());
  for (std::size_t i = 0; i < n_; ++i) {
    for (int k : columns) codes.push_back(code(i, k));
  }
  Dataset out(Shape(std::move(cards)), std::move(names), std::move(labels), std::move(codes));
  out.tags_ = tags_;
  return out;
}

std::uint64_t Dataset::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (int c : shape_.cardinalities()) mix(static_cast<std::uint64_t>(c));
  mix(n_);
  for (int c : codes_) mix(static_cast<std::uint64_t>(c));
  return h;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

std::vector<Record> read_records(const std::string& text) {
  std::vector<Record> out;
  Record rec;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  rec.line = 1;
  auto end_record = [&] {
    rec.fields.push_back(std::move(field));
    field.clear();
    const bool blank = rec.fields.size() == 1 && rec.fields[0].empty() && !field_started;
    if (!blank) out.push_back(std::move(rec));
    rec = Record{};
    field_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw ParseError("line " + std::to_string(line) + ": stray quote inside a field");
        }
        quoted = true;
        field_started = true;
        break;
      case ',':
        rec.fields.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        rec.line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(rec.line) + ": unterminated quoted field");
  if (field_started || !field.empty()) end_record();
  return out;
}

}  // namespace

Dataset parse_csv(const std::string& text, const CsvOptions& options) {
  const auto records = read_records(text);
  if (records.empty()) throw ParseError("CSV input is empty");
  const std::size_t d = records.front().fields.size();
  if (d > static_cast<std::size_t>(kMaxVariables)) {
    throw ParseError("CSV has " + std::to_string(d) + " columns; at most " +
                     std::to_string(kMaxVariables) + " are supported");
  }
  std::vector<std::string> names;
  std::size_t first = 0;
  if (options.header) {
    names = records.front().fields;
    first = 1;
  } else {
    for (std::size_t k = 0; k < d; ++k) names.push_back("x" + std::to_string(k + 1));
  }

  std::vector<std::vector<std::string>> labels(d);
  std::vector<std::unordered_map<std::string, int>> lookup(d);
  std::vector<int> codes;
  codes.reserve((records.size() - first) * d);
  for (std::size_t r = first; r < records.size(); ++r) {
    const Record& rec = records[r];
    if (rec.fields.size() != d) {
      throw ParseError("line " + std::to_string(rec.line) + ": expected " + std::to_string(d) +
                       " fields, found " + std::to_string(rec.fields.size()));
    }
    for (std::size_t k = 0; k < d; ++k) {
      std::string v = rec.fields[k];
      if (v.empty()) v = kMissingLabel;
      auto [it, inserted] = lookup[k].try_emplace(v, static_cast<int>(labels[k].size()));
      if (inserted) labels[k].push_back(v);
      codes.push_back(it->second);
    }
  }

  std::vector<int> cards(d);
  for (std::size_t k = 0; k < d; ++k) {
    if (labels[k].size() < 2) {
      if (options.degenerate == DegeneratePolicy::error) {
        throw DomainError("degenerate column '" + names[k] + "': " +
                          std::to_string(labels[k].size()) +
                          " distinct value(s); every variable needs at least 2 categories");
      }
      for (int pad = 0; labels[k].size() < 2; ++pad) {
        labels[k].push_back(pad == 0 ? options.pad_label : options.pad_label + std::to_string(pad + 1));
      }
    }
    cards[k] = static_cast<int>(labels[k].size());
  }
  return Dataset(Shape(std::move(cards)), std::move(names), std::move(labels), std::move(codes));
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), options);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Dataset parse_csv_with_labels(const std::string& text, const std::vector<std::string>& names,
                              const std::vector<std::vector<std::string>>& labels) {
  const auto records = read_records(text);
  if (records.empty()) throw ParseError("CSV input is empty");
  const auto& header = records.front().fields;
  if (header.size() != names.size()) {
    throw ParseError("CSV has " + std::to_string(header.size()) + " columns, expected " +
                     std::to_string(names.size()));
  }
  std::vector<std::unordered_map<std::string, int>> lookup(names.size());
  std::vector<int> cards;
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (header[k] != names[k]) {
      throw ParseError("column " + std::to_string(k + 1) + " is '" + header[k] + "', expected '" +
                       names[k] + "'");
    }
    for (std::size_t c = 0; c < labels[k].size(); ++c) lookup[k].emplace(labels[k][c], static_cast<int>(c));
    cards.push_back(static_cast<int>(labels[k].size()));
  }
  std::vector<int> codes;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const Record& rec = records[r];
    if (rec.fields.size() != names.size()) {
      throw ParseError("line " + std::to_string(rec.line) + ": expected " +
                       std::to_string(names.size()) + " fields, found " +
                       std::to_string(rec.fields.size()));
    }
    for (std::size_t k = 0; k < names.size(); ++k) {
      const std::string v = rec.fields[k].empty() ? kMissingLabel : rec.fields[k];
      const auto it = lookup[k].find(v);
      if (it == lookup[k].end()) {
        throw ParseError("line " + std::to_string(rec.line) + ": unknown category '" + v +
                         "' in column " + names[k]);
      }
      codes.push_back(it->second);
    }
  }
  return Dataset(Shape(std::move(cards)), names, labels, std::move(codes));
}

Dataset load_csv_with_labels(const std::string& path, const std::vector<std::string>& names,
                             const std::vector<std::vector<std::string>>& labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv_with_labels(buf.str(), names, labels);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Splits and marginals

SplitCounts split_counts(std::size_t n) {
  SplitCounts c;
  c.test = n / 2;
  const std::size_t rest = n - c.test;
  c.train = rest * 7 / 10;
  c.val = rest - c.train;
  return c;
}

Dataset split(const Dataset& ds, std::uint64_t seed) {
  if (ds.n() < 10) throw DomainError("splitting needs at least 10 rows, got " + std::to_string(ds.n()));
  const SplitCounts c = split_counts(ds.n());
  std::vector<std::size_t> perm(ds.n());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  Rng rng = make_rng(seed, "split");
  shuffle(perm.begin(), perm.end(), rng);
  std::vector<SplitTag> tags(ds.n());
  for (std::size_t j = 0; j < perm.size(); ++j) {
    tags[perm[j]] = j < c.test ? SplitTag::test : j < c.test + c.train ? SplitTag::train : SplitTag::val;
  }
  Dataset out = ds;
  out.set_tags(std::move(tags));
  return out;
}

ProbTensor empirical_marginal(const Dataset& ds, VarSubset s, double smoothing) {
  if (!(smoothing >= 0.0)) throw DomainError("smoothing must be non-negative");
  if (ds.n() == 0) throw DomainError("empirical marginal of an empty dataset");
  if (!s.is_subset_of(ds.shape().all())) throw DomainError(s.to_string() + " is outside the dataset");
  DenseTensor counts = DenseTensor::filled(ds.shape(), s, smoothing);
  const auto vars = s.members();
  const Shape& shape = ds.shape();
  for (std::size_t i = 0; i < ds.n(); ++i) {
    std::size_t offset = 0;
    for (int k : vars) {
      offset = offset * static_cast<std::size_t>(shape.cardinality(k)) +
               static_cast<std::size_t>(ds.code(i, k));
    }
    counts[offset] += 1.0;
  }
  return ProbTensor::normalize(std::move(counts));
}

EtaVector empirical_eta(const Dataset& ds, const InteractionCollection& collection,
                        double smoothing) {
  EtaVector eta;
  for (VarSubset s : collection.insertion_order()) {
    if (!s.empty()) eta.set(empirical_marginal(ds, s, smoothing));
  }
  return eta;
}

double empirical_joint_entropy(const Dataset& ds) {
  if (ds.n() == 0) throw DomainError("entropy of an empty dataset");
  std::map<std::vector<int>, std::size_t> counts;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto r = ds.row(i);
    ++counts[std::vector<int>(r.begin(), r.end())];
  }
  const double n = static_cast<double>(ds.n());
  double h = 0.0;
  for (const auto& [row, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Synthetic data

InteractionCollection complexity_collection(Complexity c) {
  auto v = [](std::initializer_list<int> one_based) {
    std::vector<int> m(one_based);
    return VarSubset::of_one_based(m);
  };
  InteractionCollection low{v({1}), v({2}), v({3}), v({4}), v({1, 2}), v({1, 4}), v({2, 3})};
  switch (c) {
    case Complexity::low:
      return low;
    case Complexity::med:
      low.add(v({1, 3}));
      low.add(v({1, 2, 3}));
      return low;
    case Complexity::high:
      return InteractionCollection::powerset(VarSubset::full(4));
  }
  return low;
}

SyntheticSpec complexity_preset(Complexity c, std::uint64_t seed) {
  return SyntheticSpec{Shape({5, 5, 5, 5}), complexity_collection(c), 1.0, seed};
}

ThetaModel synth_truth(const SyntheticSpec& spec) {
  if (!is_hierarchical(spec.collection)) {
    throw DomainError("synthetic ground-truth collection must be hierarchical");
  }
  if (!(spec.sigma >= 0.0)) throw DomainError("sigma must be non-negative");
  spec.shape.require_enumerable(spec.shape.all(), "synthetic generation");
  ThetaModel model(spec.shape, spec.collection);
  Rng rng = make_rng(spec.seed, "synth-theta");
  for (VarSubset s : spec.collection.sorted()) {
    if (s.empty()) continue;
    DenseTensor t = DenseTensor::zeros(spec.shape, s);
    for (double& v : t.values()) v = spec.sigma * standard_normal(rng);
    model.set_theta(s, center_fibers(std::move(t)));
  }
  refresh_exact_normalizer(model);
  return model;
}

Dataset sample_rows(const ProbTensor& p, std::size_t n, std::uint64_t seed) {
  const Shape shape = full_shape_of(p.tensor());
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  Rng rng = make_rng(seed, "synth-rows");
  std::vector<int> codes;
  codes.reserve(n * static_cast<std::size_t>(shape.d()));
  std::vector<int> digits(static_cast<std::size_t>(shape.d()));
  for (std::size_t r = 0; r < n; ++r) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t cell = static_cast<std::size_t>(it - cdf.begin());
    if (cell >= cdf.size()) cell = cdf.size() - 1;
    while (p[cell] <= 0.0 && cell > 0) --cell;
    unravel(cell, shape.cardinalities(), digits);
    codes.insert(codes.end(), digits.begin(), digits.end());
  }
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> labels;
  for (int k = 0; k < shape.d(); ++k) {
    names.push_back("x" + std::to_string(k + 1));
    std::vector<std::string> l;
    for (int c = 0; c < shape.cardinality(k); ++c) l.push_back(std::to_string(c));
    labels.push_back(std::move(l));
  }
  return Dataset(shape, std::move(names), std::move(labels), std::move(codes));
}

SyntheticDraw synth_generate(const SyntheticSpec& spec, std::size_t n) {
  SyntheticDraw out;
  out.truth_model = synth_truth(spec);
  out.truth = model_distribution(out.truth_model);
  out.data = sample_rows(out.truth, n, spec.seed);
  return out;
}

// ---------------------------------------------------------------------------
// Classification

Classification classify(const ThetaModel& model, const Dataset& ds, int target) {
  const Shape& shape = model.shape();
  if (!(ds.shape() == shape)) throw DomainError("dataset shape does not match the model");
  if (target < 0 || target >= shape.d()) {
    throw DomainError("target column " + std::to_string(target + 1) + " out of range");
  }
  std::vector<VarSubset> involved;
  for (VarSubset s : model.subsets()) {
    if (s.contains(target)) involved.push_back(s);
  }
  const int classes = shape.cardinality(target);
  Classification out;
  out.target = target;
  out.predicted.resize(ds.n());
  out.probabilities.resize(ds.n() * static_cast<std::size_t>(classes));
  std::vector<int> x(static_cast<std::size_t>(shape.d()));
  std::vector<double> e(static_cast<std::size_t>(classes));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto r = ds.row(i);
    std::copy(r.begin(), r.end(), x.begin());
    for (int c = 0; c < classes; ++c) {
      x[static_cast<std::size_t>(target)] = c;
      double v = 0.0;
      for (VarSubset s : involved) {
        std::size_t offset = 0;
        for (int k : s.members()) {
          offset = offset * static_cast<std::size_t>(shape.cardinality(k)) +
                   static_cast<std::size_t>(x[static_cast<std::size_t>(k)]);
        }
        v += model.theta(s)[offset];
      }
      e[static_cast<std::size_t>(c)] = v;
    }
    int best = 0;
    for (int c = 1; c < classes; ++c) {
      if (e[static_cast<std::size_t>(c)] > e[static_cast<std::size_t>(best)]) best = c;
    }
    const double lz = log_sum_exp(e);
    for (int c = 0; c < classes; ++c) {
      out.probabilities[i * static_cast<std::size_t>(classes) + static_cast<std::size_t>(c)] =
          std::exp(e[static_cast<std::size_t>(c)] - lz);
    }
    out.predicted[i] = best;
    if (best == r[static_cast<std::size_t>(target)]) ++correct;
  }
  out.accuracy = ds.n() == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(ds.n());
  return out;
}

}  // namespace mahgenta
