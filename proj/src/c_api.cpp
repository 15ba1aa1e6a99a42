#include "mahgenta/mahgenta.h"

#include <cstdio>
#include <cstring>
#include <new>
#include <string>

#include "json.hpp"
#include "mahgenta/data.hpp"
#include "mahgenta/error.hpp"
#include "mahgenta/info.hpp"
#include "mahgenta/io.hpp"
#include "mahgenta/mcmc.hpp"
#include "mahgenta/selection.hpp"

using namespace mahgenta;

struct mhg_dataset {
  Dataset ds;
};
struct mhg_model {
  ModelFile file;
};
struct mhg_dist {
  ProbTensor p;
};

namespace {

thread_local std::string g_last_error;

mhg_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument:
      return MHG_ERR_ARGUMENT;
    case ErrorKind::domain:
      return MHG_ERR_DOMAIN;
    case ErrorKind::capacity:
      return MHG_ERR_CAPACITY;
    case ErrorKind::convergence:
      return MHG_ERR_CONVERGENCE;
    case ErrorKind::step_size:
      return MHG_ERR_STEP_SIZE;
    case ErrorKind::parse:
      return MHG_ERR_PARSE;
    case ErrorKind::io:
      return MHG_ERR_IO;
  }
  return MHG_ERR_INTERNAL;
}

template <class F>
mhg_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MHG_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MHG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MHG_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw ArgumentError(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

VarSubset subset_arg(const int* members, int n, int d) {
  require(n >= 0 && (n == 0 || members != nullptr), "subset pointer is null");
  std::vector<int> m(members, members + n);
  for (int v : m) {
    if (v < 1 || v > d) throw DomainError("variable " + std::to_string(v) + " is outside 1.." + std::to_string(d));
  }
  return VarSubset::of_one_based(m);
}

CsvOptions csv_options(int pad) {
  CsvOptions o;
  o.degenerate = pad ? DegeneratePolicy::pad : DegeneratePolicy::error;
  return o;
}

SelectionConfig to_config(const mhg_fit_config* c) {
  mhg_fit_config def;
  mhg_fit_config_default(&def);
  if (c == nullptr) c = &def;
  SelectionConfig s;
  s.tau = c->tau;
  s.k = c->k;
  s.epochs_per_round = c->epochs;
  s.lr = c->lr;
  s.max_order = c->max_order;
  s.renormalize_score = c->renormalize != 0;
  s.error_mode = c->error_mode == MHG_ERROR_ESTIMATED_NLL ? ErrorMode::estimated_nll : ErrorMode::exact_kl;
  switch (c->precondition) {
    case MHG_PRECONDITION_NONE:
      s.precondition = Preconditioner::none;
      break;
    case MHG_PRECONDITION_CELL_COUNT:
      s.precondition = Preconditioner::cell_count;
      break;
    case MHG_PRECONDITION_FISHER:
      s.precondition = Preconditioner::fisher;
      break;
    default:
      throw ArgumentError("unknown preconditioner");
  }
  s.backtrack = c->backtrack != 0;
  s.max_rounds = c->max_rounds;
  s.extra_rounds = c->extra_rounds;
  s.n_chains = c->n_chains;
  s.sweeps_per_epoch = c->sweeps_per_epoch;
  s.ais.n_chains = c->ais_chains;
  s.ais.n_temps = c->ais_temps;
  s.ais.sweeps_per_temp = c->ais_sweeps;
  if (c->verbose) {
    s.on_round = [](const RoundRecord& r) {
      std::fprintf(stderr, "round %d: %zu interactions, %llu parameters, train %.6f, val %.6f (%.1fs)\n",
                   r.round, r.collection_size, static_cast<unsigned long long>(r.parameter_count),
                   r.train_error, r.val_error, r.seconds);
    };
  }
  return s;
}

std::string config_json(const SelectionConfig& c, std::uint64_t seed, const Dataset& train,
                        const char* method) {
  nlohmann::json j;
  j["method"] = method;
  j["tau"] = c.tau;
  j["k"] = c.k;
  j["epochs"] = c.epochs_per_round;
  j["lr"] = c.lr;
  j["max_order"] = c.max_order;
  j["renormalize"] = c.renormalize_score;
  j["error_mode"] = c.error_mode == ErrorMode::exact_kl ? "exact" : "ais";
  j["seed"] = seed;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(train.hash()));
  j["train_hash"] = hash;
  return j.dump();
}

mhg_model* wrap_result(SelectionResult r, const Dataset& train, std::string provenance) {
  auto* m = new mhg_model;
  m->file.model = std::move(r.model);
  m->file.names = train.names();
  m->file.labels = train.labels();
  m->file.provenance_json = std::move(provenance);
  return m;
}

}  // namespace

extern "C" {

const char* mhg_version(void) { return "0.1.0"; }

const char* mhg_last_error(void) { return g_last_error.c_str(); }

const char* mhg_status_name(mhg_status status) {
  switch (status) {
    case MHG_OK:
      return "ok";
    case MHG_ERR_ARGUMENT:
      return "invalid argument";
    case MHG_ERR_DOMAIN:
      return "domain error";
    case MHG_ERR_CAPACITY:
      return "capacity exceeded";
    case MHG_ERR_CONVERGENCE:
      return "no convergence";
    case MHG_ERR_STEP_SIZE:
      return "step size too large";
    case MHG_ERR_PARSE:
      return "parse error";
    case MHG_ERR_IO:
      return "i/o error";
    case MHG_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown";
}

void mhg_string_free(char* s) { std::free(s); }

uint64_t mhg_enumeration_cap(void) { return enumeration_cap(); }

void mhg_set_enumeration_cap(uint64_t cap) { set_enumeration_cap(cap); }

// ---- datasets ---------------------------------------------------------------

mhg_status mhg_dataset_load_csv(const char* path, int pad_degenerate, mhg_dataset** out) {
  return guard([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new mhg_dataset{load_csv(path, csv_options(pad_degenerate))};
  });
}

mhg_status mhg_dataset_parse_csv(const char* text, int pad_degenerate, mhg_dataset** out) {
  return guard([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new mhg_dataset{parse_csv(text, csv_options(pad_degenerate))};
  });
}

void mhg_dataset_free(mhg_dataset* ds) { delete ds; }

size_t mhg_dataset_rows(const mhg_dataset* ds) { return ds ? ds->ds.n() : 0; }

int mhg_dataset_cols(const mhg_dataset* ds) { return ds ? ds->ds.d() : 0; }

mhg_status mhg_dataset_cardinalities(const mhg_dataset* ds, int* out, int cap) {
  return guard([&] {
    require(ds != nullptr && (out != nullptr || cap == 0), "null argument");
    const auto& c = ds->ds.shape().cardinalities();
    for (int k = 0; k < cap && k < static_cast<int>(c.size()); ++k) out[k] = c[static_cast<std::size_t>(k)];
  });
}

mhg_status mhg_dataset_select_columns(const mhg_dataset* ds, const int* columns, int n,
                                      mhg_dataset** out) {
  return guard([&] {
    require(ds != nullptr && out != nullptr && columns != nullptr && n > 0, "null argument");
    std::vector<int> cols;
    for (int i = 0; i < n; ++i) cols.push_back(columns[i] - 1);
    *out = new mhg_dataset{ds->ds.select_columns(cols)};
  });
}

int mhg_dataset_column_index(const mhg_dataset* ds, const char* name) {
  if (ds == nullptr || name == nullptr) return 0;
  const auto& names = ds->ds.names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return static_cast<int>(k) + 1;
  }
  return 0;
}

mhg_status mhg_dataset_split(const mhg_dataset* ds, uint64_t seed, mhg_dataset** train,
                             mhg_dataset** val, mhg_dataset** test) {
  return guard([&] {
    require(ds != nullptr && train != nullptr && val != nullptr && test != nullptr, "null argument");
    const Dataset tagged = split(ds->ds, seed);
    auto* a = new mhg_dataset{tagged.subset(SplitTag::train)};
    auto* b = new mhg_dataset{tagged.subset(SplitTag::val)};
    auto* c = new mhg_dataset{tagged.subset(SplitTag::test)};
    *train = a;
    *val = b;
    *test = c;
  });
}

mhg_status mhg_dataset_to_csv(const mhg_dataset* ds, char** out) {
  return guard([&] {
    require(ds != nullptr && out != nullptr, "null argument");
    *out = dup_string(dataset_to_csv(ds->ds));
  });
}

uint64_t mhg_dataset_hash(const mhg_dataset* ds) { return ds ? ds->ds.hash() : 0; }

// ---- distributions ------------------------------------------------------------

mhg_status mhg_dist_from_json(const char* text, mhg_dist** out) {
  return guard([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new mhg_dist{distribution_from_json(text)};
  });
}

mhg_status mhg_dist_from_dataset(const mhg_dataset* ds, mhg_dist** out) {
  return guard([&] {
    require(ds != nullptr && out != nullptr, "null argument");
    ds->ds.shape().require_enumerable(ds->ds.shape().all(), "empirical joint distribution");
    *out = new mhg_dist{empirical_marginal(ds->ds, ds->ds.shape().all())};
  });
}

mhg_status mhg_dist_to_json(const mhg_dist* p, char** out) {
  return guard([&] {
    require(p != nullptr && out != nullptr, "null argument");
    *out = dup_string(distribution_to_json(p->p));
  });
}

void mhg_dist_free(mhg_dist* p) { delete p; }

mhg_status mhg_dist_kl_uniform(const mhg_dist* p, double* nats) {
  return guard([&] {
    require(p != nullptr && nats != nullptr, "null argument");
    const Shape shape = full_shape_of(p->p.tensor());
    *nats = kl_divergence(p->p, ProbTensor::uniform(shape, shape.all()));
  });
}

mhg_status mhg_info(const mhg_dist* p, const int* subset, int n, mhg_measure measure, int bits,
                    double* out) {
  return guard([&] {
    require(p != nullptr && out != nullptr, "null argument");
    const Shape shape = full_shape_of(p->p.tensor());
    const VarSubset s = subset_arg(subset, n, shape.d());
    const Unit unit = bits ? Unit::bits : Unit::nats;
    switch (measure) {
      case MHG_MEASURE_H:
        *out = entropy(p->p, s, unit);
        break;
      case MHG_MEASURE_I:
        *out = mmi(p->p, s, unit);
        break;
      case MHG_MEASURE_J:
        *out = j_value(p->p, s, unit);
        break;
      case MHG_MEASURE_RI_MARG:
        *out = to_unit(canonical_ri(p->p, s, CanonicalMode::marginal), unit);
        break;
      case MHG_MEASURE_RI_COND:
        *out = to_unit(canonical_ri(p->p, s, CanonicalMode::conditional), unit);
        break;
      default:
        throw ArgumentError("unknown measure");
    }
  });
}

mhg_status mhg_info_dataset(const mhg_dataset* ds, const int* subset, int n, mhg_measure measure,
                            int bits, double* out) {
  return guard([&] {
    require(ds != nullptr && out != nullptr, "null argument");
    const VarSubset s = subset_arg(subset, n, ds->ds.d());
    if (measure == MHG_MEASURE_RI_MARG || measure == MHG_MEASURE_RI_COND) {
      const ProbTensor p = (ds->ds.shape().require_enumerable(ds->ds.shape().all(), "refined information"),
                            empirical_marginal(ds->ds, ds->ds.shape().all()));
      const mhg_dist wrapped{p};
      const mhg_status st = mhg_info(&wrapped, subset, n, measure, bits, out);
      if (st != MHG_OK) throw Error(ErrorKind::domain, g_last_error);
      return;
    }
    // H, I and J only need the marginal on S.
    const ProbTensor m = empirical_marginal(ds->ds, s);
    std::vector<int> cards;
    for (int k : s.members()) cards.push_back(ds->ds.shape().cardinality(k));
    const Shape local(cards);
    const ProbTensor ps(DenseTensor(local.all(), cards, std::vector<double>(m.values().begin(), m.values().end())));
    const VarSubset all = local.all();
    const Unit unit = bits ? Unit::bits : Unit::nats;
    switch (measure) {
      case MHG_MEASURE_H:
        *out = entropy(ps, all, unit);
        break;
      case MHG_MEASURE_I:
        *out = mmi(ps, all, unit);
        break;
      case MHG_MEASURE_J:
        *out = j_value(ps, all, unit);
        break;
      default:
        throw ArgumentError("unknown measure");
    }
  });
}

mhg_status mhg_decompose(const mhg_dist* p, const char* chain_json, int use_ipf,
                         char** report_json, double* residual) {
  return guard([&] {
    require(p != nullptr && report_json != nullptr, "null argument");
    Projector projector(p->p, use_ipf ? ProjectionMethod::ipf : ProjectionMethod::gradient);
    projector.shape().require_enumerable(projector.shape().all(), "decomposition");
    const Chain chain = chain_json != nullptr ? chain_from_json(chain_json) : greedy_chain(projector);
    const DecompositionReport report = decompose_chain(projector, chain);
    if (residual != nullptr) *residual = report.residual();
    *report_json = dup_string(report_to_json(report));
  });
}

// ---- synthetic data -------------------------------------------------------------

mhg_status mhg_synth_preset(const char* complexity, size_t n, uint64_t seed, mhg_dist** truth,
                            mhg_dataset** data) {
  return guard([&] {
    require(complexity != nullptr && truth != nullptr && data != nullptr, "null argument");
    const std::string c = complexity;
    Complexity level;
    if (c == "low") {
      level = Complexity::low;
    } else if (c == "med") {
      level = Complexity::med;
    } else if (c == "high") {
      level = Complexity::high;
    } else {
      throw ArgumentError("complexity must be low, med or high");
    }
    SyntheticDraw draw = synth_generate(complexity_preset(level, seed), n);
    auto* t = new mhg_dist{std::move(draw.truth)};
    *data = new mhg_dataset{std::move(draw.data)};
    *truth = t;
  });
}

mhg_status mhg_synth_custom(const int* cards, int d, const char* collection_json, double sigma,
                            size_t n, uint64_t seed, mhg_dist** truth, mhg_dataset** data) {
  return guard([&] {
    require(cards != nullptr && d > 0 && collection_json != nullptr && truth != nullptr &&
                data != nullptr,
            "null argument");
    SyntheticSpec spec{Shape(std::vector<int>(cards, cards + d)), collection_from_json(collection_json),
                       sigma, seed};
    SyntheticDraw draw = synth_generate(spec, n);
    auto* t = new mhg_dist{std::move(draw.truth)};
    *data = new mhg_dataset{std::move(draw.data)};
    *truth = t;
  });
}

// ---- fitting ----------------------------------------------------------------------

void mhg_fit_config_default(mhg_fit_config* c) {
  if (c == nullptr) return;
  const SelectionConfig s;
  c->tau = s.tau;
  c->k = s.k;
  c->epochs = s.epochs_per_round;
  c->lr = s.lr;
  c->max_order = s.max_order;
  c->renormalize = s.renormalize_score ? 1 : 0;
  c->error_mode = MHG_ERROR_EXACT_KL;
  c->precondition = s.precondition == Preconditioner::none         ? MHG_PRECONDITION_NONE
                    : s.precondition == Preconditioner::cell_count ? MHG_PRECONDITION_CELL_COUNT
                                                                   : MHG_PRECONDITION_FISHER;
  c->backtrack = s.backtrack ? 1 : 0;
  c->max_rounds = s.max_rounds;
  c->extra_rounds = s.extra_rounds;
  c->n_chains = s.n_chains;
  c->sweeps_per_epoch = s.sweeps_per_epoch;
  c->ais_chains = s.ais.n_chains;
  c->ais_temps = s.ais.n_temps;
  c->ais_sweeps = s.ais.sweeps_per_temp;
  c->verbose = 0;
}

mhg_status mhg_fit(const mhg_dataset* train, const mhg_dataset* val, const mhg_fit_config* config,
                   uint64_t seed, mhg_model** out, char** history_csv) {
  return guard([&] {
    require(train != nullptr && val != nullptr && out != nullptr, "null argument");
    const SelectionConfig c = to_config(config);
    SelectionResult r = mahgenta_fit(train->ds, val->ds, c, seed);
    std::string hist = history_to_csv(r.history);
    mhg_model* m = wrap_result(std::move(r), train->ds, config_json(c, seed, train->ds, "mahgenta"));
    if (history_csv != nullptr) *history_csv = dup_string(hist);
    *out = m;
  });
}

mhg_status mhg_fit_order(const mhg_dataset* train, const mhg_dataset* val, int order,
                         const mhg_fit_config* config, uint64_t seed, mhg_model** out,
                         char** history_csv) {
  return guard([&] {
    require(train != nullptr && val != nullptr && out != nullptr, "null argument");
    require(order >= 1, "order must be at least 1");
    const SelectionConfig c = to_config(config);
    const auto collection = InteractionCollection::up_to_order(train->ds.d(), order);
    SelectionResult r = fixed_fit(train->ds, val->ds, collection, c, seed);
    std::string hist = history_to_csv(r.history);
    mhg_model* m = wrap_result(std::move(r), train->ds,
                               config_json(c, seed, train->ds, ("order-" + std::to_string(order)).c_str()));
    if (history_csv != nullptr) *history_csv = dup_string(hist);
    *out = m;
  });
}

// ---- models -------------------------------------------------------------------------

mhg_status mhg_model_load(const char* path, mhg_model** out) {
  return guard([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new mhg_model{load_model(path)};
  });
}

mhg_status mhg_model_from_json(const char* text, mhg_model** out) {
  return guard([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new mhg_model{model_from_json(text)};
  });
}

mhg_status mhg_model_save(const mhg_model* m, const char* path) {
  return guard([&] {
    require(m != nullptr && path != nullptr, "null argument");
    save_model(path, m->file);
  });
}

mhg_status mhg_model_to_json(const mhg_model* m, char** out) {
  return guard([&] {
    require(m != nullptr && out != nullptr, "null argument");
    *out = dup_string(model_to_json(m->file));
  });
}

void mhg_model_free(mhg_model* m) { delete m; }

mhg_status mhg_model_set_provenance(mhg_model* m, const char* json) {
  return guard([&] {
    require(m != nullptr && json != nullptr, "null argument");
    try {
      m->file.provenance_json = nlohmann::json::parse(json).dump();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("provenance: ") + e.what());
    }
  });
}

int mhg_model_vars(const mhg_model* m) { return m ? m->file.model.shape().d() : 0; }

size_t mhg_model_interactions(const mhg_model* m) { return m ? m->file.model.subsets().size() : 0; }

mhg_status mhg_model_collection(const mhg_model* m, char** out) {
  return guard([&] {
    require(m != nullptr && out != nullptr, "null argument");
    std::string s;
    for (VarSubset t : m->file.model.collection().sorted()) {
      if (t.empty()) continue;
      if (!s.empty()) s += ';';
      s += t.to_string();
    }
    *out = dup_string(s);
  });
}

mhg_status mhg_model_uniform(const int* cards, int d, mhg_model** out) {
  return guard([&] {
    require(cards != nullptr && d > 0 && out != nullptr, "null argument");
    auto* m = new mhg_model;
    try {
      Shape shape(std::vector<int>(cards, cards + d));
      m->file.model = ThetaModel(shape, InteractionCollection{});
      m->file.model.set_log_normalizer({0.0, NormalizerStatus::stale, 0.0});
      for (int k = 0; k < d; ++k) {
        m->file.names.push_back("x" + std::to_string(k + 1));
        std::vector<std::string> l;
        for (int c = 0; c < cards[k]; ++c) l.push_back(std::to_string(c));
        m->file.labels.push_back(std::move(l));
      }
    } catch (...) {
      delete m;
      throw;
    }
    *out = m;
  });
}

mhg_status mhg_model_error(const mhg_model* m, const mhg_dataset* ds, mhg_error_mode mode,
                           double* out) {
  return guard([&] {
    require(m != nullptr && ds != nullptr && out != nullptr, "null argument");
    *out = dataset_error(m->file.model, ds->ds,
                         mode == MHG_ERROR_EXACT_KL ? ErrorMode::exact_kl : ErrorMode::estimated_nll);
  });
}

void mhg_ais_options_default(mhg_ais_options* o) {
  if (o == nullptr) return;
  const AisOptions a;
  o->n_chains = a.n_chains;
  o->n_temps = a.n_temps;
  o->sweeps_per_temp = a.sweeps_per_temp;
  o->geometric = 0;
}

mhg_status mhg_model_logz(mhg_model* m, mhg_logz_method method, const mhg_ais_options* options,
                          uint64_t seed, double* log_z, char** json) {
  return guard([&] {
    require(m != nullptr, "null argument");
    ThetaModel& model = m->file.model;
    const bool enumerable = model.shape().event_count() <= enumeration_cap();
    const bool exact = method == MHG_LOGZ_EXACT || (method == MHG_LOGZ_AUTO && enumerable);
    std::string text;
    if (exact) {
      refresh_exact_normalizer(model);
      nlohmann::json j;
      j["format_version"] = kFormatVersion;
      j["kind"] = "log_partition";
      j["method"] = "exact";
      j["log_z"] = model.log_normalizer().value;
      j["stderr"] = 0.0;
      text = j.dump(1) + "\n";
    } else {
      AisOptions a;
      if (options != nullptr) {
        a.n_chains = options->n_chains;
        a.n_temps = options->n_temps;
        a.sweeps_per_temp = options->sweeps_per_temp;
        a.schedule = options->geometric ? TemperatureSchedule::geometric : TemperatureSchedule::uniform;
      }
      a.seed = substream_seed(seed, "ais");
      const AisEstimate est = ais_log_partition(model, a);
      double ex = 0.0;
      if (enumerable) ex = exact_log_partition(model);
      model.set_log_normalizer({est.log_z, NormalizerStatus::estimated, est.stderr_nats});
      text = ais_to_json(est, ex, enumerable);
      if (!est.reliable) {
        if (json != nullptr) *json = dup_string(text);
        if (log_z != nullptr) *log_z = est.log_z;
        throw ConvergenceError("AIS weights are degenerate (effective sample size " +
                                   std::to_string(est.ess) + " < 2); estimate is unreliable",
                               est.ess);
      }
    }
    if (log_z != nullptr) *log_z = model.log_normalizer().value;
    if (json != nullptr) *json = dup_string(text);
  });
}

mhg_status mhg_model_sample(const mhg_model* m, size_t n, int burn_in, int thin, uint64_t seed,
                            char** csv) {
  return guard([&] {
    require(m != nullptr && csv != nullptr, "null argument");
    const auto draws = sample(m->file.model, n, burn_in, thin, seed);
    *csv = dup_string(samples_to_csv(draws, m->file.names, m->file.labels));
  });
}

mhg_status mhg_model_encode_csv(const mhg_model* m, const char* path, mhg_dataset** out) {
  return guard([&] {
    require(m != nullptr && path != nullptr && out != nullptr, "null argument");
    *out = new mhg_dataset{load_csv_with_labels(path, m->file.names, m->file.labels)};
  });
}

mhg_status mhg_model_classify(const mhg_model* m, const mhg_dataset* ds, int target,
                              double* accuracy, char** predictions_csv) {
  return guard([&] {
    require(m != nullptr && ds != nullptr, "null argument");
    const Classification c = classify(m->file.model, ds->ds, target - 1);
    if (accuracy != nullptr) *accuracy = c.accuracy;
    if (predictions_csv != nullptr) *predictions_csv = dup_string(predictions_to_csv(c, ds->ds));
  });
}

mhg_status mhg_model_column_name(const mhg_model* m, int column, char** out) {
  return guard([&] {
    require(m != nullptr && out != nullptr, "null argument");
    if (column < 1 || column > static_cast<int>(m->file.names.size())) {
      throw DomainError("column " + std::to_string(column) + " out of range");
    }
    *out = dup_string(m->file.names[static_cast<std::size_t>(column - 1)]);
  });
}

}  // extern "C"
