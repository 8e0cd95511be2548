#include <catch2/catch.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "trashfire/dataset.hpp"
#include "trashfire/parse.hpp"

using namespace trashfire;

namespace {

const char* kHeader =
    "dataset,attack,attack_strength,defence,defence_strength,layers,epochs,"
    "t_train,t_predict,t_attack,event,acc_ben,acc_adv\n";

ExperimentRecord make_record(const std::string& attack, double strength,
                             double t_attack, bool event) {
  ExperimentRecord r;
  r.dataset = "mnist";
  r.attack = attack;
  r.attack_strength = strength;
  r.defence = "control";
  r.defence_strength = 0.0;
  r.layers = 18;
  r.epochs = 20;
  r.t_train = 0.004;
  r.t_predict = 0.0002;
  r.t_attack = t_attack;
  r.event = event;
  r.acc_ben = 0.98;
  r.acc_adv = 0.22;
  return r;
}

}  // namespace

TEST_CASE("csv row maps to a validated record", "[parse]") {
  std::istringstream in(std::string(kHeader) +
                        "mnist,fgm,0.1,control,0,18,20,0.004,0.0002,0.31,true,0.98,0.22\n");
  const auto records = parse_csv(in);
  REQUIRE(records.size() == 1);
  const auto& r = records[0];
  CHECK(r.dataset == "mnist");
  CHECK(r.attack == "fgm");
  CHECK(r.attack_strength == Approx(0.1));
  CHECK(r.defence == "control");
  CHECK(r.layers == 18);
  CHECK(r.epochs == 20);
  CHECK(r.t_attack == Approx(0.31));
  CHECK(r.event);
  CHECK(r.acc_adv == Approx(0.22));
}

TEST_CASE("csv error paths", "[parse]") {
  SECTION("non-positive time is a row-level error naming the row") {
    std::istringstream in(std::string(kHeader) +
                          "mnist,fgm,0.1,control,0,18,20,0.004,0.0002,0.31,true,0.98,0.22\n"
                          "mnist,fgm,0.1,control,0,18,20,0.004,0.0002,-1,true,0.98,0.22\n");
    CHECK_THROWS_WITH(parse_csv(in), Catch::Contains("row 2") &&
                                        Catch::Contains("t_attack"));
  }
  SECTION("header only yields an empty list") {
    std::istringstream in(kHeader);
    CHECK(parse_csv(in).empty());
  }
  SECTION("missing column is a schema error naming the column") {
    std::istringstream in(
        "dataset,attack,attack_strength,defence,defence_strength,layers,epochs,"
        "t_train,t_predict,t_attack,event,acc_ben\n");
    CHECK_THROWS_AS(parse_csv(in), SchemaError);
    std::istringstream in2(
        "dataset,attack,attack_strength,defence,defence_strength,layers,epochs,"
        "t_train,t_predict,t_attack,event,acc_ben\n");
    CHECK_THROWS_WITH(parse_csv(in2), Catch::Contains("acc_adv"));
  }
  SECTION("unparseable value reports its location") {
    std::istringstream in(std::string(kHeader) +
                          "mnist,fgm,xyz,control,0,18,20,0.004,0.0002,0.31,true,0.98,0.22\n");
    CHECK_THROWS_WITH(parse_csv(in), Catch::Contains("row 1") &&
                                        Catch::Contains("attack_strength"));
  }
  SECTION("event accepts only true,false,1,0") {
    std::istringstream in(std::string(kHeader) +
                          "mnist,fgm,0.1,control,0,18,20,0.004,0.0002,0.31,yes,0.98,0.22\n");
    CHECK_THROWS_AS(parse_csv(in), ParseError);
  }
  SECTION("empty input requires a header") {
    std::istringstream in("");
    CHECK_THROWS_AS(parse_csv(in), SchemaError);
  }
}

TEST_CASE("jsonl parsing", "[parse]") {
  std::istringstream in(
      R"({"dataset":"mnist","attack":"fgm","attack_strength":0.1,"defence":"control","defence_strength":0,"layers":18,"epochs":20,"t_train":0.004,"t_predict":0.0002,"t_attack":0.31,"event":true,"acc_ben":0.98,"acc_adv":0.22})"
      "\n"
      R"({"dataset":"mnist","attack":"pgd","attack_strength":0.3,"defence":"control","defence_strength":0,"layers":18,"epochs":20,"t_train":0.004,"t_predict":0.0002,"t_attack":1.2,"event":0,"acc_ben":0.98,"acc_adv":0.22})"
      "\n");
  const auto records = parse_jsonl(in);
  REQUIRE(records.size() == 2);
  CHECK(records[0].event);
  CHECK_FALSE(records[1].event);
  CHECK(records[1].attack == "pgd");

  std::istringstream missing(R"({"dataset":"mnist","attack":"fgm"})" "\n");
  CHECK_THROWS_AS(parse_jsonl(missing), SchemaError);

  std::istringstream garbage("not json\n");
  CHECK_THROWS_AS(parse_jsonl(garbage), ParseError);
}

TEST_CASE("csv round trip through write_csv", "[parse]") {
  std::vector<ExperimentRecord> records = {make_record("fgm", 0.25, 0.5, true),
                                           make_record("pgd", 0.75, 1.5, false)};
  std::ostringstream out;
  write_csv(records, out);
  std::istringstream in(out.str());
  const auto parsed = parse_csv(in);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].attack_strength == records[0].attack_strength);
  CHECK(parsed[1].t_attack == records[1].t_attack);
  CHECK(parsed[1].event == records[1].event);
}

TEST_CASE("per-family min-max scaling matches the pixel grid", "[encode]") {
  // Strengths {1,4,16,64,256} scale to {0, 3/255, 15/255, 63/255, 1}.
  std::vector<ExperimentRecord> records;
  for (double s : {1.0, 4.0, 16.0, 64.0, 256.0})
    records.push_back(make_record("pixel", s, 0.5, true));
  std::vector<std::size_t> rows = {0, 1, 2, 3, 4};
  const EncodingMeta meta = build_encoding(records, rows);
  const SurvivalDataset ds = apply_encoding(records, rows, meta, SplitTag::train);
  const std::vector<double> expected = {0.0, 3.0 / 255, 15.0 / 255, 63.0 / 255, 1.0};
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(ds.design(i, 0) == Approx(expected[i]).margin(1e-15));
}

TEST_CASE("single categorical level emits no dummy column", "[encode]") {
  std::vector<ExperimentRecord> records = {make_record("fgm", 0.1, 0.5, true),
                                           make_record("fgm", 0.2, 0.6, true)};
  std::vector<std::size_t> rows = {0, 1};
  const EncodingMeta meta = build_encoding(records, rows);
  for (const auto& name : meta.feature_names())
    CHECK(name.find("attack=") == std::string::npos);
}

TEST_CASE("train statistics are reused for test encoding", "[encode]") {
  // Mean 10, sd 2 for epochs on train; a test value of 12 encodes to 1.0.
  std::vector<ExperimentRecord> records;
  for (long e : {8, 12, 8, 12}) {
    auto r = make_record("fgm", 0.1, 0.5, true);
    r.epochs = e;
    records.push_back(r);
  }
  {
    auto r = make_record("fgm", 0.1, 0.5, true);
    r.epochs = 12;
    records.push_back(r);
  }
  std::vector<std::size_t> train_rows = {0, 1, 2, 3};  // mean 10, population sd 2
  const EncodingMeta meta = build_encoding(records, train_rows);
  const SurvivalDataset test = apply_encoding(records, {4}, meta, SplitTag::test);
  const auto names = meta.feature_names();
  const auto idx = static_cast<std::size_t>(
      std::find(names.begin(), names.end(), "epochs") - names.begin());
  CHECK(test.design(0, idx) == Approx(1.0).margin(1e-14));
}

TEST_CASE("encode splits deterministically and exhaustively", "[encode]") {
  std::vector<ExperimentRecord> records;
  for (int i = 0; i < 25; ++i)
    records.push_back(make_record(i % 2 ? "fgm" : "pgd", 0.1 * (i % 7 + 1),
                                  0.1 + 0.05 * i, i % 3 != 0));

  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    auto [train, test] = encode(records, seed, 0.2);
    CHECK(train.n() == 20);
    CHECK(test.n() == 5);
    std::set<std::size_t> seen(train.source_rows.begin(), train.source_rows.end());
    seen.insert(test.source_rows.begin(), test.source_rows.end());
    CHECK(seen.size() == records.size());  // disjoint and exhaustive

    auto [train2, test2] = encode(records, seed, 0.2);
    CHECK(train2.design == train.design);
    CHECK(test2.source_rows == test.source_rows);
  }
}

TEST_CASE("re-encoding the train split is bit-identical", "[encode]") {
  std::vector<ExperimentRecord> records;
  for (int i = 0; i < 40; ++i) {
    auto r = make_record(i % 3 == 0 ? "fgm" : (i % 3 == 1 ? "pgd" : "pixel"),
                         0.05 * (i + 1), 0.2 + 0.03 * i, i % 4 != 0);
    r.layers = 18 + (i % 5) * 16;
    r.epochs = 10 + i;
    records.push_back(r);
  }
  auto [train, test] = encode(records, 11, 0.2);
  const SurvivalDataset again =
      apply_encoding(records, train.source_rows, train.meta, SplitTag::train);
  CHECK(again.design == train.design);
}

TEST_CASE("scaled train strength columns attain 0 and 1", "[encode]") {
  std::vector<ExperimentRecord> records;
  for (int i = 0; i < 30; ++i)
    records.push_back(make_record(i % 2 ? "fgm" : "pgd", 0.1 * (i % 9 + 1),
                                  0.1 + 0.05 * i, true));
  auto [train, test] = encode(records, 5, 0.2);
  double lo = 1e9, hi = -1e9;
  for (std::size_t i = 0; i < train.n(); ++i) {
    lo = std::min(lo, train.design(i, 0));
    hi = std::max(hi, train.design(i, 0));
  }
  CHECK(lo == Approx(0.0).margin(1e-15));
  CHECK(hi == Approx(1.0).margin(1e-15));
}

TEST_CASE("raw strengths decode from the design within 1e-12", "[encode]") {
  std::vector<ExperimentRecord> records;
  for (int i = 0; i < 50; ++i) {
    auto r = make_record(i % 3 == 0 ? "fgm" : (i % 3 == 1 ? "pgd" : "hsj"),
                         0.037 * (i + 1), 0.2 + 0.03 * i, true);
    r.defence = i % 2 ? "gauss_in" : "control";
    r.defence_strength = i % 2 ? 0.01 * i : 0.0;
    records.push_back(r);
  }
  auto [train, test] = encode(records, 3, 0.2);
  for (std::size_t i = 0; i < train.n(); ++i) {
    const auto [attack, defence] = decode_strengths(train, i);
    const auto& r = records[train.source_rows[i]];
    CHECK(attack == Approx(r.attack_strength).epsilon(1e-12));
    CHECK(defence == Approx(r.defence_strength).margin(1e-12));
  }
}

TEST_CASE("unseen test level gets zero dummies and a warning", "[encode]") {
  std::vector<ExperimentRecord> records = {make_record("fgm", 0.1, 0.5, true),
                                           make_record("pgd", 0.2, 0.6, true),
                                           make_record("deep", 0.7, 0.9, true)};
  const EncodingMeta meta = build_encoding(records, {0, 1});
  const SurvivalDataset test = apply_encoding(records, {2}, meta, SplitTag::test);
  REQUIRE_FALSE(test.warnings.empty());
  CHECK_THAT(test.warnings.front(), Catch::Contains("deep"));
  const std::size_t base = meta.dummy_offset();
  for (std::size_t j = base; j < test.p(); ++j) CHECK(test.design(0, j) == 0.0);
}

TEST_CASE("zero-variance continuous column warns and scales by 1", "[encode]") {
  std::vector<ExperimentRecord> records = {make_record("fgm", 0.1, 0.5, true),
                                           make_record("fgm", 0.2, 0.6, true)};
  std::vector<std::string> warnings;
  const EncodingMeta meta = build_encoding(records, {0, 1}, &warnings);
  CHECK_FALSE(warnings.empty());
  // layers is constant 18 in both rows.
  const auto names = meta.feature_names();
  const auto idx = static_cast<std::size_t>(
      std::find(names.begin(), names.end(), "layers") - names.begin());
  const SurvivalDataset ds = apply_encoding(records, {0, 1}, meta, SplitTag::train);
  CHECK(ds.design(0, idx) == Approx(0.0).margin(1e-14));  // (18-18)/1
}

TEST_CASE("encode rejects bad arguments", "[encode]") {
  std::vector<ExperimentRecord> records;
  CHECK_THROWS_AS(encode(records, 0, 0.2), ContractError);
  records.push_back(make_record("fgm", 0.1, 0.5, true));
  CHECK_THROWS_AS(encode(records, 0, 0.0), ContractError);
  CHECK_THROWS_AS(encode(records, 0, 1.0), ContractError);
}
