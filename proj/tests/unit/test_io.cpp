#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "mahgenta/error.hpp"
#include "mahgenta/io.hpp"
#include "oracles.hpp"

using namespace mahgenta;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const char* name) {
  const auto dir = fs::temp_directory_path() / "mahgenta_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("model round trip is bit exact") {
  std::mt19937_64 gen(1);
  const Shape shape({2, 3, 4});
  ModelFile f;
  f.model = oracle::random_model(shape, oracle::random_hierarchical(3, gen), gen, 1.3);
  refresh_exact_normalizer(f.model);
  f.names = {"a", "b", "c"};
  f.labels = {{"0", "1"}, {"x", "y", "z"}, {"p", "q", "r", "s"}};
  f.provenance_json = R"({"seed":3})";
  const auto path = scratch("model.json").string();
  save_model(path, f);
  const auto g = load_model(path);
  CHECK(g.model.collection().sorted() == f.model.collection().sorted());
  for (VarSubset s : f.model.subsets()) {
    const auto a = f.model.theta(s).values(), b = g.model.theta(s).values();
    CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
  CHECK(g.model.log_normalizer().value == f.model.log_normalizer().value);
  CHECK(g.model.log_normalizer().status == NormalizerStatus::exact);
  CHECK(g.names == f.names);
  CHECK(g.labels == f.labels);
  CHECK(model_to_json(g) == model_to_json(f));
}

TEST_CASE("format version is checked") {
  ModelFile f;
  f.model = ThetaModel(Shape({2, 2}), InteractionCollection{VarSubset()});
  auto text = model_to_json(f);
  const auto at = text.find("\"format_version\": 1");
  REQUIRE(at != std::string::npos);
  auto bumped = text;
  bumped.replace(at, 19, "\"format_version\": 9");
  CHECK_THROWS_AS(model_from_json(bumped), ParseError);
  auto missing = text;
  missing.replace(at, 20, "");
  CHECK_THROWS_AS(model_from_json(missing), ParseError);
  CHECK_THROWS_AS(model_from_json("{not json"), ParseError);
  CHECK_THROWS_AS(distribution_from_json(text), ParseError);
}

TEST_CASE("distribution, collection and chain files") {
  const auto p = oracle::xor3();
  const auto q = distribution_from_json(distribution_to_json(p));
  CHECK(q.tensor().max_abs_diff(p.tensor()) == 0.0);

  const auto c = InteractionCollection::up_to_order(3, 2);
  CHECK(collection_from_json(collection_to_json(c)).sorted() == c.sorted());
  CHECK(collection_from_json(R"({"subsets": [[1], [1, 3]]})").contains(VarSubset::of({0, 2})));

  const VarSubset adds[] = {VarSubset::of({1}), VarSubset::of({0}), VarSubset::of({0, 1})};
  const auto chain = Chain::from_additions(adds);
  CHECK(chain_from_json(chain_to_json(chain)).added_subsets() == chain.added_subsets());
}

TEST_CASE("atomic writes replace whole files") {
  const auto path = scratch("atomic.txt").string();
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  CHECK(read_file(path) == "second");
  for (const auto& e : fs::directory_iterator(fs::path(path).parent_path())) {
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
  }
  CHECK_THROWS_AS(write_file_atomic("/nonexistent-dir/x/y.txt", "z"), IoError);
  CHECK_THROWS_AS(read_file("/nonexistent-dir/x/y.txt"), IoError);
}

TEST_CASE("csv writers") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const auto ds = parse_csv("x,y\na,\"b,c\"\nd,e\n");
  const auto again = parse_csv(dataset_to_csv(ds));
  CHECK(again.codes() == ds.codes());
  CHECK(again.labels() == ds.labels());

  SelectionHistory h;
  h.rounds.push_back(RoundRecord{0, 1, 0, 0.5, 0.6, {}, 0.0});
  h.rounds.push_back(RoundRecord{1, 3, 2, 0.4, 0.5, {VarSubset::of({0}), VarSubset::of({1})}, 0.1});
  const auto csv = history_to_csv(h);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

}  // TEST_SUITE
