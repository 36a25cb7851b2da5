#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "cdes/projection.hpp"
#include "cdes/sense_bank.hpp"
#include "json.hpp"
#include "run.hpp"
#include "test_util.hpp"
#include "wsd_fixture.hpp"

namespace cdes {
namespace {

using cli::run;
using testing::TempDir;
using Json = nlohmann::json;

const std::filesystem::path kFixture = CDES_FIXTURE_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cdes(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

// Pipeline command on the tiny fixture, writing into `dir`.
Outcome fixture_cmd(const std::string& command, const std::filesystem::path& dir,
                    std::vector<std::string> extra = {}) {
  std::vector<std::string> args{command, "--config", (kFixture / "fixture.cfg").string(),
                                "--output-dir", dir.string(), "--threads", "1"};
  args.insert(args.end(), extra.begin(), extra.end());
  return cdes(args);
}

Json read_json(const std::filesystem::path& p) { return Json::parse(testing::read_bytes(p)); }

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(cdes({"--help"}).code, 0);
  EXPECT_NE(cdes({"--help"}).out.find("build-bank"), std::string::npos);
  EXPECT_EQ(cdes({}).code, cli::kExitValidation);
  EXPECT_EQ(cdes({"frobnicate"}).code, cli::kExitValidation);
}

TEST(Cli, TrainWritesReloadableCheckpoint) {
  TempDir dir;
  const auto r = fixture_cmd("train", dir.path(), {"--epochs", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto model = load_checkpoint(dir / "model.cdem");
  EXPECT_EQ(model.p(), 4u);
  EXPECT_EQ(model.q(), 6u);
  EXPECT_EQ(model.activation(), Activation::kGelu);
  const auto report = read_json(dir / "train_report.json");
  EXPECT_EQ(report["train_loss"].size(), 3u);
  EXPECT_EQ(report["records"]["skipped_no_gold"], 1);
  EXPECT_EQ(report["records"]["skipped_oov"], 1);
  EXPECT_EQ(report["loss_convention"], "mean-per-record");
  EXPECT_TRUE(std::filesystem::exists(dir / "train_report.txt"));
}

TEST(Cli, TrainTwiceIsByteIdentical) {
  TempDir a;
  TempDir b;
  ASSERT_EQ(fixture_cmd("train", a.path(), {"--epochs", "4"}).code, 0);
  ASSERT_EQ(fixture_cmd("train", b.path(), {"--epochs", "4"}).code, 0);
  EXPECT_EQ(testing::read_bytes(a / "model.cdem"), testing::read_bytes(b / "model.cdem"));
  EXPECT_EQ(testing::read_bytes(a / "train_report.json"),
            testing::read_bytes(b / "train_report.json"));
}

TEST(Cli, SeedChangesTheModel) {
  TempDir a;
  TempDir b;
  ASSERT_EQ(fixture_cmd("train", a.path(), {"--epochs", "1"}).code, 0);
  ASSERT_EQ(fixture_cmd("train", b.path(), {"--epochs", "1", "--seed", "14"}).code, 0);
  EXPECT_NE(testing::read_bytes(a / "model.cdem"), testing::read_bytes(b / "model.cdem"));
}

TEST(Cli, MissingStaticTableFailsValidationBeforeTraining) {
  TempDir dir;
  const auto r = fixture_cmd("train", dir.path(), {"--static-table", "/no/such/file.txt"});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("static_table"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(dir / "model.cdem"));
}

TEST(Cli, BadSettingsAreValidationErrors) {
  TempDir dir;
  EXPECT_EQ(fixture_cmd("train", dir.path(), {"--no-such-key", "1"}).code, cli::kExitValidation);
  EXPECT_EQ(fixture_cmd("train", dir.path(), {"--epochs", "many"}).code, cli::kExitValidation);
  EXPECT_EQ(fixture_cmd("train", dir.path(), {"--activation", "tanh"}).code,
            cli::kExitValidation);
  EXPECT_EQ(fixture_cmd("train", dir.path(), {"--learning-rate", "-1"}).code,
            cli::kExitValidation);
  testing::write_text(dir / "bad.cfg", "epochs 3\n");
  EXPECT_EQ(cdes({"train", "--config", (dir / "bad.cfg").string()}).code, cli::kExitValidation);
}

TEST(Cli, OverridesWinOverConfigFile) {
  TempDir dir;
  ASSERT_EQ(fixture_cmd("train", dir.path(), {"--epochs=2", "--activation", "relu"}).code, 0);
  const auto report = read_json(dir / "train_report.json");
  EXPECT_EQ(report["train_loss"].size(), 2u);
  EXPECT_EQ(report["model"]["activation"], "relu");
}

TEST(Cli, BuildBankFullCoverage) {
  TempDir dir;
  ASSERT_EQ(fixture_cmd("train", dir.path(), {"--epochs", "2"}).code, 0);
  const auto r = fixture_cmd("build-bank", dir.path());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = read_json(dir / "bank_report.json");
  EXPECT_EQ(report["coverage"]["gloss_fraction"], 1.0);
  EXPECT_EQ(report["coverage"]["corpus_fraction"], 1.0);
  EXPECT_NE(r.out.find("100.0%"), std::string::npos);
  const auto bank = load_bank(dir / "bank.cdeb");
  EXPECT_EQ(bank.size(), 11u);
  EXPECT_EQ(bank.dim(), 4u + 2 * 6u);
  EXPECT_TRUE(std::filesystem::exists(dir / "clusters.tsv"));
}

TEST(Cli, BuildBankWithoutCorpusData) {
  TempDir dir;
  ASSERT_EQ(fixture_cmd("train", dir.path(), {"--epochs", "2"}).code, 0);
  const auto r = fixture_cmd("build-bank", dir.path(),
                             {"--collocations=", "--corpus-sentences=", "--corpus-dump=",
                              "--fill-policy", "zero"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = read_json(dir / "bank_report.json");
  EXPECT_EQ(report["coverage"]["corpus_fraction"], 0.0);
  EXPECT_EQ(report["coverage"]["with_corpus"], 0);
  const auto bank = load_bank(dir / "bank.cdeb");
  ASSERT_EQ(bank.size(), 11u);
  for (const auto& e : bank.entries()) {
    for (float x : bank.corpus_segment(e)) EXPECT_EQ(x, 0.0f);
  }
}

TEST(Cli, BuildBankRebuildIsIdentical) {
  TempDir dir;
  ASSERT_EQ(fixture_cmd("train", dir.path(), {"--epochs", "2"}).code, 0);
  ASSERT_EQ(fixture_cmd("build-bank", dir.path()).code, 0);
  const auto first = testing::read_bytes(dir / "bank.cdeb");
  ASSERT_EQ(fixture_cmd("build-bank", dir.path()).code, 0);
  EXPECT_EQ(testing::read_bytes(dir / "bank.cdeb"), first);
}

TEST(Cli, BuildBankDimensionMismatchIsReported) {
  TempDir dir;
  ASSERT_EQ(fixture_cmd("train", dir.path(), {"--epochs", "1"}).code, 0);
  testing::write_text(dir / "wide.txt", "bank 1 2 3\nbass 1 2 3\n");
  const auto r = fixture_cmd("build-bank", dir.path(), {"--static-table", (dir / "wide.txt").string()});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  EXPECT_NE(r.err.find("p="), std::string::npos);
}

TEST(Cli, EvalWsdOnConstructedOptimum) {
  TempDir dir;
  const auto fx = testing::write_constructed_wsd(dir.path(), 20, 5);
  ASSERT_GT(fx.min_margin, 0.0);
  const auto r = cdes({"eval-wsd", "--bank", fx.bank.string(), "--inventory",
                       fx.inventory.string(), "--static-table", fx.static_table.string(),
                       "--eval-dumps", fx.dump.string(), "--eval-keys", fx.keys.string(),
                       "--eval-names", "oracle", "--output-dir", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = read_json(dir / "wsd_report.json");
  EXPECT_EQ(report["datasets"][0]["f1"], 1.0);
  EXPECT_EQ(report["pooled"]["recall"], 1.0);
  // the plain keyfile mirrors the gold keys line for line
  EXPECT_EQ(testing::read_bytes(dir / "predictions.oracle.key"), testing::read_bytes(fx.keys));
  const auto preds = read_predictions(dir / "predictions.oracle.txt");
  EXPECT_EQ(preds.size(), 20u);
}

TEST(Cli, EvalWsdEmptySetIsRejected) {
  TempDir dir;
  ContextDump empty{6, {}};
  save_context_dump(empty, dir / "empty.cde");
  testing::write_text(dir / "empty.key", "");
  ASSERT_EQ(fixture_cmd("train", dir.path(), {"--epochs", "1"}).code, 0);
  ASSERT_EQ(fixture_cmd("build-bank", dir.path()).code, 0);
  const auto r = fixture_cmd("eval-wsd", dir.path(),
                             {"--eval-dumps", (dir / "empty.cde").string(), "--eval-keys",
                              (dir / "empty.key").string()});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("empty"), std::string::npos);
}

TEST(Cli, EvalWicOnRandomBalancedPairs) {
  TempDir dir;
  ASSERT_EQ(fixture_cmd("train", dir.path(), {"--epochs", "2"}).code, 0);
  ASSERT_EQ(fixture_cmd("build-bank", dir.path()).code, 0);
  const auto r = fixture_cmd("eval-wic", dir.path());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = read_json(dir / "wic_report.json");
  EXPECT_EQ(report["test"]["total"], 200);
  const double acc = report["test"]["accuracy"];
  EXPECT_GE(acc, 0.35);
  EXPECT_LE(acc, 0.65);
}

TEST(Cli, NeighborsListing) {
  TempDir dir;
  ASSERT_EQ(fixture_cmd("train", dir.path(), {"--epochs", "2"}).code, 0);
  ASSERT_EQ(fixture_cmd("build-bank", dir.path()).code, 0);
  const auto r = fixture_cmd("neighbors", dir.path(), {"--query", "bank%1:14:00::", "--top-n", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "neighbours of bank%1:14:00::");
  const std::regex row(R"(^[1-4]\. \S+ \([a-z]+\)  -?[0-9]+\.[0-9]{6}$)");
  int rows = 0;
  double prev = 2.0;
  while (std::getline(lines, line)) {
    EXPECT_TRUE(std::regex_match(line, row)) << line;
    EXPECT_EQ(line.find("bank%1:14:00::"), std::string::npos);  // self excluded
    const double score = std::stod(line.substr(line.rfind(' ') + 1));
    EXPECT_LE(score, prev);
    prev = score;
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(read_json(dir / "neighbors.json")["neighbors"].size(), 4u);

  EXPECT_EQ(fixture_cmd("neighbors", dir.path()).code, cli::kExitValidation);
  EXPECT_EQ(fixture_cmd("neighbors", dir.path(), {"--query", "nope%0"}).code, cli::kExitRuntime);
}

TEST(Cli, InspectDetectsFormats) {
  const auto dump = cdes({"inspect", (kFixture / "train.cde").string(), "--json"});
  ASSERT_EQ(dump.code, 0) << dump.err;
  const auto j = Json::parse(dump.out);
  EXPECT_EQ(j["format"], "dump");
  EXPECT_EQ(j["q"], 6);
  EXPECT_EQ(j["records"], 332);
  EXPECT_EQ(Json::parse(cdes({"inspect", (kFixture / "inventory.tsv").string(), "--json"}).out)["format"],
            "inventory");
  EXPECT_EQ(Json::parse(cdes({"inspect", (kFixture / "static.txt").string(), "--json"}).out)["format"],
            "table");
  EXPECT_EQ(Json::parse(cdes({"inspect", (kFixture / "eval_a.key").string(), "--json"}).out)["format"],
            "keys");
  EXPECT_EQ(Json::parse(cdes({"inspect", (kFixture / "collocations.tsv").string(), "--json"}).out)["format"],
            "collocations");
  EXPECT_EQ(cdes({"inspect", "/no/such/file"}).code, cli::kExitValidation);
}

}  // namespace
}  // namespace cdes
