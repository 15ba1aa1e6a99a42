// mahgenta command-line tool. Talks to the library only through mahgenta.h.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "mahgenta/mahgenta.h"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kCapacity = 3, kConvergence = 4 };

int exit_code_for(mhg_status s) {
  switch (s) {
    case MHG_OK:
      return kOk;
    case MHG_ERR_ARGUMENT:
      return kUsage;
    case MHG_ERR_CAPACITY:
      return kCapacity;
    case MHG_ERR_CONVERGENCE:
    case MHG_ERR_STEP_SIZE:
      return kConvergence;
    default:
      return kFailure;
  }
}

struct Failure {
  int code;
  std::string message;
};

void check(mhg_status s, const std::string& stage) {
  if (s != MHG_OK) {
    throw Failure{exit_code_for(s), stage + ": " + mhg_status_name(s) + ": " + mhg_last_error()};
  }
}

[[noreturn]] void usage_error(const std::string& msg) { throw Failure{kUsage, msg}; }

struct Str {
  char* p = nullptr;
  ~Str() { mhg_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct DatasetDel {
  void operator()(mhg_dataset* d) const { mhg_dataset_free(d); }
};
struct ModelDel {
  void operator()(mhg_model* m) const { mhg_model_free(m); }
};
struct DistDel {
  void operator()(mhg_dist* p) const { mhg_dist_free(p); }
};
using DatasetPtr = std::unique_ptr<mhg_dataset, DatasetDel>;
using ModelPtr = std::unique_ptr<mhg_model, ModelDel>;
using DistPtr = std::unique_ptr<mhg_dist, DistDel>;

std::string read_text(const std::string& path, const std::string& stage) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kFailure, stage + ": cannot open " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// temp + rename so an error never leaves half a file behind
void write_text(const std::string& path, const std::string& text, const std::string& stage) {
  if (path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure{kFailure, stage + ": cannot write " + tmp};
    out << text;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw Failure{kFailure, stage + ": write to " + tmp + " failed"};
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Failure{kFailure, stage + ": cannot move output into place at " + path};
  }
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage_error(std::string("--") + what + ": '" + item + "' is not an integer");
    }
  }
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (static_cast<unsigned char>(c) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", c);
      out += buf;
    } else {
      out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// ---- shared data options -------------------------------------------------------

struct DataArgs {
  std::string path;
  std::string columns;
  bool pad = false;

  void add(CLI::App* cmd, bool required) {
    auto* o = cmd->add_option("--data", path, "CSV file with a header row");
    if (required) o->required();
    cmd->add_option("--columns", columns, "1-based columns to keep, e.g. 1,2,3 (default all)");
    cmd->add_flag("--pad-degenerate", pad, "give single-category columns an unobserved category");
  }

  DatasetPtr load(const std::string& stage) const {
    mhg_dataset* raw = nullptr;
    check(mhg_dataset_load_csv(path.c_str(), pad ? 1 : 0, &raw), stage + ": loading " + path);
    DatasetPtr ds(raw);
    if (!columns.empty()) {
      const auto cols = parse_int_list(columns, "columns");
      mhg_dataset* sel = nullptr;
      check(mhg_dataset_select_columns(ds.get(), cols.data(), static_cast<int>(cols.size()), &sel),
            stage + ": selecting columns");
      ds.reset(sel);
    }
    return ds;
  }
};

// ---- fit ------------------------------------------------------------------------

struct FitArgs {
  DataArgs data;
  mhg_fit_config config{};
  unsigned long long seed = 0;
  bool renorm = true;
  std::string error_mode = "exact";
  std::string precondition;
  int order = 0;
  std::string out = "model.json";
  std::string history;
  bool no_backtrack = false;
  bool quiet = false;
};

int run_fit(FitArgs& a) {
  const std::string stage = "fit";
  a.config.renormalize = a.renorm ? 1 : 0;
  a.config.error_mode = a.error_mode == "ais" ? MHG_ERROR_ESTIMATED_NLL : MHG_ERROR_EXACT_KL;
  if (!a.precondition.empty()) {
    a.config.precondition = a.precondition == "none"         ? MHG_PRECONDITION_NONE
                            : a.precondition == "cell-count" ? MHG_PRECONDITION_CELL_COUNT
                                                             : MHG_PRECONDITION_FISHER;
  }
  if (a.no_backtrack) a.config.backtrack = 0;
  a.config.verbose = a.quiet ? 0 : 1;

  DatasetPtr ds = a.data.load(stage);
  mhg_dataset *tr = nullptr, *va = nullptr, *te = nullptr;
  check(mhg_dataset_split(ds.get(), a.seed, &tr, &va, &te), stage + ": splitting data");
  DatasetPtr train(tr), val(va), test(te);

  mhg_model* raw = nullptr;
  Str hist;
  if (a.order > 0) {
    check(mhg_fit_order(train.get(), val.get(), a.order, &a.config, a.seed, &raw, &hist.p),
          stage + ": fitting order-" + std::to_string(a.order) + " model");
  } else {
    check(mhg_fit(train.get(), val.get(), &a.config, a.seed, &raw, &hist.p), stage + ": selection");
  }
  ModelPtr model(raw);

  const mhg_error_mode mode = a.config.error_mode;
  double train_err = 0.0, val_err = 0.0, test_err = 0.0;
  check(mhg_model_error(model.get(), train.get(), mode, &train_err), stage + ": train error");
  check(mhg_model_error(model.get(), val.get(), mode, &val_err), stage + ": validation error");
  check(mhg_model_error(model.get(), test.get(), mode, &test_err), stage + ": test error");

  const std::string history_path = a.history.empty() ? a.out + ".history.csv" : a.history;
  check(mhg_model_save(model.get(), a.out.c_str()), stage + ": writing model");
  write_text(history_path, hist.str(), stage + ": writing history");

  Str coll;
  check(mhg_model_collection(model.get(), &coll.p), stage + ": collection");
  const char* unit = mode == MHG_ERROR_EXACT_KL ? "KL" : "NLL";
  std::printf("interactions: %zu\n", mhg_model_interactions(model.get()));
  std::printf("collection: %s\n", coll.str().c_str());
  std::printf("train %s: %.6f nats\nval %s: %.6f nats\ntest %s: %.6f nats\n", unit, train_err, unit,
              val_err, unit, test_err);
  std::printf("model: %s\nhistory: %s\n", a.out.c_str(), history_path.c_str());
  return kOk;
}

// ---- decompose ------------------------------------------------------------------

struct DecomposeArgs {
  DataArgs data;
  std::string dist;
  std::string chain = "greedy";
  bool ipf = false;
  std::string out = "-";
};

DistPtr load_distribution(const DataArgs& data, const std::string& dist, const std::string& stage) {
  mhg_dist* raw = nullptr;
  if (!dist.empty()) {
    const std::string text = read_text(dist, stage);
    check(mhg_dist_from_json(text.c_str(), &raw), stage + ": reading " + dist);
  } else {
    DatasetPtr ds = data.load(stage);
    check(mhg_dist_from_dataset(ds.get(), &raw), stage + ": empirical distribution");
  }
  return DistPtr(raw);
}

int run_decompose(const DecomposeArgs& a) {
  const std::string stage = "decompose";
  if (a.data.path.empty() == a.dist.empty()) usage_error("decompose: give exactly one of --data or --dist");
  DistPtr p = load_distribution(a.data, a.dist, stage);
  std::string chain_text;
  if (a.chain != "greedy") chain_text = read_text(a.chain, stage);
  Str report;
  double residual = 0.0;
  check(mhg_decompose(p.get(), a.chain == "greedy" ? nullptr : chain_text.c_str(), a.ipf ? 1 : 0,
                      &report.p, &residual),
        stage);
  write_text(a.out, report.str(), stage + ": writing report");
  std::fprintf(stderr, "telescoping residual: %.3e nats\n", residual);
  return kOk;
}

// ---- synth ----------------------------------------------------------------------

struct SynthArgs {
  std::string complexity;
  std::string collection;
  std::string cards = "5,5,5,5";
  double sigma = 1.0;
  std::size_t n = 1000;
  unsigned long long seed = 0;
  std::string truth_out = "truth.json";
  std::string samples_out = "samples.csv";
};

int run_synth(const SynthArgs& a) {
  const std::string stage = "synth";
  if (a.complexity.empty() == a.collection.empty()) {
    usage_error("synth: give exactly one of --complexity or --collection");
  }
  mhg_dist* t = nullptr;
  mhg_dataset* d = nullptr;
  if (!a.complexity.empty()) {
    check(mhg_synth_preset(a.complexity.c_str(), a.n, a.seed, &t, &d), stage);
  } else {
    const auto cards = parse_int_list(a.cards, "cards");
    const std::string text = read_text(a.collection, stage);
    check(mhg_synth_custom(cards.data(), static_cast<int>(cards.size()), text.c_str(), a.sigma, a.n,
                           a.seed, &t, &d),
          stage);
  }
  DistPtr truth(t);
  DatasetPtr data(d);
  Str tj, csv;
  check(mhg_dist_to_json(truth.get(), &tj.p), stage + ": truth");
  check(mhg_dataset_to_csv(data.get(), &csv.p), stage + ": samples");
  double kl = 0.0;
  check(mhg_dist_kl_uniform(truth.get(), &kl), stage + ": KL to uniform");
  write_text(a.truth_out, tj.str(), stage + ": writing truth");
  write_text(a.samples_out, csv.str(), stage + ": writing samples");
  std::printf("KL(truth; uniform) = %.10g nats\n", kl);
  return kOk;
}

// ---- sample ---------------------------------------------------------------------

struct SampleArgs {
  std::string model;
  std::size_t n = 1000;
  int burn_in = 100;
  int thin = 1;
  unsigned long long seed = 0;
  std::string out = "-";
};

ModelPtr load_model(const std::string& path, const std::string& stage) {
  mhg_model* raw = nullptr;
  check(mhg_model_load(path.c_str(), &raw), stage + ": loading " + path);
  return ModelPtr(raw);
}

int run_sample(const SampleArgs& a) {
  const std::string stage = "sample";
  ModelPtr m = load_model(a.model, stage);
  Str csv;
  check(mhg_model_sample(m.get(), a.n, a.burn_in, a.thin, a.seed, &csv.p), stage);
  write_text(a.out, csv.str(), stage + ": writing samples");
  return kOk;
}

// ---- logz -----------------------------------------------------------------------

struct LogzArgs {
  std::string model;
  std::string method = "auto";
  mhg_ais_options ais{};
  bool geometric = false;
  unsigned long long seed = 0;
  std::string out = "-";
  std::string save;
};

int run_logz(LogzArgs& a) {
  const std::string stage = "logz";
  ModelPtr m = load_model(a.model, stage);
  const mhg_logz_method method = a.method == "exact" ? MHG_LOGZ_EXACT
                                 : a.method == "ais" ? MHG_LOGZ_AIS
                                                     : MHG_LOGZ_AUTO;
  a.ais.geometric = a.geometric ? 1 : 0;
  Str json;
  double log_z = 0.0;
  const mhg_status st = mhg_model_logz(m.get(), method, &a.ais, a.seed, &log_z, &json.p);
  if (json.p != nullptr) write_text(a.out, json.str(), stage + ": writing estimate");
  check(st, stage);
  if (!a.save.empty()) check(mhg_model_save(m.get(), a.save.c_str()), stage + ": writing model");
  return kOk;
}

// ---- classify -------------------------------------------------------------------

struct ClassifyArgs {
  std::string model;
  std::string data;
  std::string target = "all";
  std::string split = "all";
  unsigned long long seed = 0;
  std::string predictions;
  std::string out = "-";
};

int run_classify(const ClassifyArgs& a) {
  const std::string stage = "classify";
  ModelPtr m = load_model(a.model, stage);
  mhg_dataset* raw = nullptr;
  check(mhg_model_encode_csv(m.get(), a.data.c_str(), &raw), stage + ": encoding " + a.data);
  DatasetPtr ds(raw);
  if (a.split != "all") {
    mhg_dataset *tr = nullptr, *va = nullptr, *te = nullptr;
    check(mhg_dataset_split(ds.get(), a.seed, &tr, &va, &te), stage + ": splitting data");
    DatasetPtr train(tr), val(va), test(te);
    if (a.split == "train") {
      ds = std::move(train);
    } else if (a.split == "val") {
      ds = std::move(val);
    } else {
      ds = std::move(test);
    }
  }
  const int d = mhg_model_vars(m.get());
  std::vector<int> targets;
  if (a.target == "all") {
    for (int k = 1; k <= d; ++k) targets.push_back(k);
  } else {
    int idx = mhg_dataset_column_index(ds.get(), a.target.c_str());
    if (idx == 0) {
      const auto v = parse_int_list(a.target, "target");
      if (v.size() != 1) usage_error("classify: --target must be a column name, a 1-based index or 'all'");
      idx = v[0];
    }
    if (idx < 1 || idx > d) usage_error("classify: target column " + std::to_string(idx) + " out of range");
    targets.push_back(idx);
  }
  if (!a.predictions.empty() && targets.size() != 1) {
    usage_error("classify: --predictions needs a single --target");
  }
  std::string table = "column,name,accuracy\n";
  std::string json = "{\"format_version\": 1, \"kind\": \"classification\", \"rows\": " +
                     std::to_string(mhg_dataset_rows(ds.get())) + ", \"accuracy\": [";
  for (std::size_t i = 0; i < targets.size(); ++i) {
    double acc = 0.0;
    Str preds, name;
    check(mhg_model_classify(m.get(), ds.get(), targets[i], &acc,
                             a.predictions.empty() ? nullptr : &preds.p),
          stage + ": column " + std::to_string(targets[i]));
    check(mhg_model_column_name(m.get(), targets[i], &name.p), stage);
    table += std::to_string(targets[i]) + ',' + name.str() + ',' + fmt(acc) + '\n';
    if (i) json += ", ";
    json += "{\"column\": " + std::to_string(targets[i]) + ", \"name\": \"" + json_escape(name.str()) +
            "\", \"accuracy\": " + fmt(acc) + "}";
    if (!a.predictions.empty()) write_text(a.predictions, preds.str(), stage + ": writing predictions");
  }
  json += "]}\n";
  if (a.out != "-") write_text(a.out, json, stage + ": writing report");
  std::fputs(table.c_str(), stdout);
  return kOk;
}

// ---- info -----------------------------------------------------------------------

struct InfoArgs {
  DataArgs data;
  std::string dist;
  std::string subset;
  std::vector<std::string> measures{"H"};
  std::string unit = "bits";
  std::string out;
};

int run_info(const InfoArgs& a) {
  const std::string stage = "info";
  if (a.data.path.empty() == a.dist.empty()) usage_error("info: give exactly one of --data or --dist");
  const auto subset = parse_int_list(a.subset, "subset");
  const int bits = a.unit == "bits" ? 1 : 0;
  DistPtr p;
  DatasetPtr ds;
  if (!a.dist.empty()) {
    p = load_distribution(a.data, a.dist, stage);
  } else {
    ds = a.data.load(stage);
  }
  std::string json = "{\"format_version\": 1, \"kind\": \"info\", \"subset\": [" + a.subset +
                     "], \"unit\": \"" + a.unit + "\", \"values\": {";
  for (std::size_t i = 0; i < a.measures.size(); ++i) {
    const std::string& name = a.measures[i];
    const mhg_measure m = name == "H"         ? MHG_MEASURE_H
                          : name == "I"       ? MHG_MEASURE_I
                          : name == "J"       ? MHG_MEASURE_J
                          : name == "RI-marg" ? MHG_MEASURE_RI_MARG
                                              : MHG_MEASURE_RI_COND;
    double v = 0.0;
    if (p) {
      check(mhg_info(p.get(), subset.data(), static_cast<int>(subset.size()), m, bits, &v), stage + ": " + name);
    } else {
      check(mhg_info_dataset(ds.get(), subset.data(), static_cast<int>(subset.size()), m, bits, &v),
            stage + ": " + name);
    }
    std::printf("%s %.12g\n", name.c_str(), v);
    if (i) json += ", ";
    json += "\"" + name + "\": " + fmt(v);
  }
  json += "}}\n";
  if (!a.out.empty()) write_text(a.out, json, stage + ": writing report");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical log-linear models: interaction selection, information decomposition, sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mhg_version()));
  app.footer(
      "Exit codes: 0 ok, 1 other failure, 2 bad arguments, 3 capacity exceeded,\n"
      "4 no convergence or step size too large.\n"
      "MAHGENTA_ENUM_CAP overrides the enumeration cap.");

  FitArgs fit;
  mhg_fit_config_default(&fit.config);
  auto* fit_cmd = app.add_subcommand("fit", "split data, select interactions and fit a model");
  fit.data.add(fit_cmd, true);
  fit_cmd->add_option("--tau", fit.config.tau, "heredity strength")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  fit_cmd->add_option("--k", fit.config.k, "interactions added per round")->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--epochs", fit.config.epochs, "gradient epochs per round")->capture_default_str()->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--lr", fit.config.lr, "learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--seed", fit.seed, "seed for split, sampling and AIS")->capture_default_str();
  fit_cmd->add_option("--max-order", fit.config.max_order, "largest interaction size")->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_flag("--renorm,!--no-renorm", fit.renorm, "divide |J| by the parameter count");
  fit_cmd->add_option("--error-mode", fit.error_mode, "exact KL or AIS-estimated NLL")
      ->capture_default_str()
      ->check(CLI::IsMember({"exact", "ais"}));
  fit_cmd->add_option("--order", fit.order, "fit the fixed collection of all subsets up to this size instead of selecting");
  fit_cmd->add_option("--precondition", fit.precondition, "gradient scaling")
      ->check(CLI::IsMember({"none", "cell-count", "fisher"}));
  fit_cmd->add_flag("--no-backtrack", fit.no_backtrack, "disable step halving in exact mode");
  fit_cmd->add_option("--max-rounds", fit.config.max_rounds, "round limit")->capture_default_str();
  fit_cmd->add_option("--extra-rounds", fit.config.extra_rounds, "rounds to keep recording after the best one")->capture_default_str();
  fit_cmd->add_option("--chains", fit.config.n_chains, "persistent chains (ais mode)")->capture_default_str();
  fit_cmd->add_option("--sweeps", fit.config.sweeps_per_epoch, "Gibbs sweeps per epoch (ais mode)")->capture_default_str();
  fit_cmd->add_option("--ais-chains", fit.config.ais_chains, "AIS chains")->capture_default_str();
  fit_cmd->add_option("--ais-temps", fit.config.ais_temps, "AIS temperatures")->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "model JSON")->capture_default_str();
  fit_cmd->add_option("--history", fit.history, "history CSV (default <out>.history.csv)");
  fit_cmd->add_flag("--quiet", fit.quiet, "no per-round progress");

  DecomposeArgs dec;
  auto* dec_cmd = app.add_subcommand("decompose", "refined-information decomposition of KL(p; uniform)");
  dec.data.add(dec_cmd, false);
  dec_cmd->add_option("--dist", dec.dist, "distribution JSON");
  dec_cmd->add_option("--chain", dec.chain, "'greedy' or a chain JSON file")->capture_default_str();
  dec_cmd->add_flag("--ipf", dec.ipf, "project with iterative proportional fitting");
  dec_cmd->add_option("--out", dec.out, "report JSON ('-' for stdout)")->capture_default_str();

  SynthArgs syn;
  auto* syn_cmd = app.add_subcommand("synth", "draw synthetic data from a random hierarchical model");
  syn_cmd->add_option("--complexity", syn.complexity, "preset over [5]^4")->check(CLI::IsMember({"low", "med", "high"}));
  syn_cmd->add_option("--collection", syn.collection, "collection JSON");
  syn_cmd->add_option("--cards", syn.cards, "cardinalities for --collection")->capture_default_str();
  syn_cmd->add_option("--sigma", syn.sigma, "theta standard deviation for --collection")->capture_default_str();
  syn_cmd->add_option("--n", syn.n, "rows to draw")->capture_default_str();
  syn_cmd->add_option("--seed", syn.seed, "seed")->capture_default_str();
  syn_cmd->add_option("--truth", syn.truth_out, "ground-truth distribution JSON")->capture_default_str();
  syn_cmd->add_option("--out", syn.samples_out, "samples CSV")->capture_default_str();

  SampleArgs smp;
  auto* smp_cmd = app.add_subcommand("sample", "block Gibbs draws from a model");
  smp_cmd->add_option("--model", smp.model, "model JSON")->required();
  smp_cmd->add_option("--n", smp.n, "draws")->capture_default_str();
  smp_cmd->add_option("--burn-in", smp.burn_in, "sweeps discarded first")->capture_default_str()->check(CLI::NonNegativeNumber);
  smp_cmd->add_option("--thin", smp.thin, "sweeps between draws")->capture_default_str()->check(CLI::PositiveNumber);
  smp_cmd->add_option("--seed", smp.seed, "seed")->capture_default_str();
  smp_cmd->add_option("--out", smp.out, "CSV ('-' for stdout)")->capture_default_str();

  LogzArgs lz;
  mhg_ais_options_default(&lz.ais);
  auto* lz_cmd = app.add_subcommand("logz", "log partition function, exact or by AIS");
  lz_cmd->add_option("--model", lz.model, "model JSON")->required();
  lz_cmd->add_option("--method", lz.method, "auto is exact under the enumeration cap")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "exact", "ais"}));
  lz_cmd->add_option("--chains", lz.ais.n_chains, "AIS chains")->capture_default_str()->check(CLI::PositiveNumber);
  lz_cmd->add_option("--temps", lz.ais.n_temps, "AIS temperatures")->capture_default_str()->check(CLI::PositiveNumber);
  lz_cmd->add_option("--sweeps", lz.ais.sweeps_per_temp, "sweeps per temperature")->capture_default_str()->check(CLI::PositiveNumber);
  lz_cmd->add_flag("--geometric", lz.geometric, "geometric temperature spacing");
  lz_cmd->add_option("--seed", lz.seed, "seed")->capture_default_str();
  lz_cmd->add_option("--out", lz.out, "JSON ('-' for stdout)")->capture_default_str();
  lz_cmd->add_option("--save", lz.save, "write the model back with the new log Z");

  ClassifyArgs cls;
  auto* cls_cmd = app.add_subcommand("classify", "predict columns from the rest through model conditionals");
  cls_cmd->add_option("--model", cls.model, "model JSON")->required();
  cls_cmd->add_option("--data", cls.data, "CSV with the model's columns")->required();
  cls_cmd->add_option("--target", cls.target, "column name, 1-based index or 'all'")->capture_default_str();
  cls_cmd->add_option("--split", cls.split, "rows to score")->capture_default_str()->check(CLI::IsMember({"all", "train", "val", "test"}));
  cls_cmd->add_option("--seed", cls.seed, "split seed")->capture_default_str();
  cls_cmd->add_option("--predictions", cls.predictions, "per-row predictions CSV (single target)");
  cls_cmd->add_option("--out", cls.out, "accuracy JSON");

  InfoArgs inf;
  auto* inf_cmd = app.add_subcommand("info", "entropy and interaction information of a subset");
  inf.data.add(inf_cmd, false);
  inf_cmd->add_option("--dist", inf.dist, "distribution JSON");
  inf_cmd->add_option("--subset", inf.subset, "1-based members, e.g. 1,2,3")->required();
  inf_cmd->add_option("--measure", inf.measures, "H, I, J, RI-marg or RI-cond (repeatable)")
      ->capture_default_str()
      ->check(CLI::IsMember({"H", "I", "J", "RI-marg", "RI-cond"}));
  inf_cmd->add_option("--unit", inf.unit, "bits or nats")->capture_default_str()->check(CLI::IsMember({"bits", "nats"}));
  inf_cmd->add_option("--out", inf.out, "JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*fit_cmd) return run_fit(fit);
    if (*dec_cmd) return run_decompose(dec);
    if (*syn_cmd) return run_synth(syn);
    if (*smp_cmd) return run_sample(smp);
    if (*lz_cmd) return run_logz(lz);
    if (*cls_cmd) return run_classify(cls);
    if (*inf_cmd) return run_info(inf);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kUsage;
}
