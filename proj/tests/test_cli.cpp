#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "simplegate/corpus.hpp"

#include "helpers.hpp"

using testutil::CliResult;
using testutil::TempDir;
using testutil::fixture;
using testutil::run_cli;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("cli: usage errors exit with 1") {
  CHECK(run_cli({}).exit_code == 1);
  CHECK(run_cli({"frobnicate"}).exit_code == 1);
  CHECK(run_cli({"stats"}).exit_code == 1);
  CHECK(run_cli({"stats", "--data", "/nonexistent.jsonl"}).exit_code == 1);
  CliResult bad_kind = run_cli({"train", "--data", fixture("annotated.jsonl"), "--resources",
                                "/tmp", "--classifier", "forest", "--out", "/tmp/x.json"});
  CHECK(bad_kind.exit_code == 1);
  CHECK(run_cli({"--help"}).exit_code == 0);
}

TEST_CASE("cli: malformed data exits with 2") {
  TempDir dir("cli");
  testutil::write_file(dir.file("bad.jsonl"), "{oops\n");
  CliResult res = run_cli({"stats", "--data", dir.file("bad.jsonl")});
  CHECK(res.exit_code == 2);
  CHECK_THAT(res.err, Catch::Matchers::StartsWith("error: malformed line 1"));
}

TEST_CASE("cli: stats summarises the bundled corpus") {
  CliResult res = run_cli({"stats", "--data", fixture("annotated.jsonl")});
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("Sentences      50") != std::string::npos);
  CHECK(res.out.find("Words") != std::string::npos);
  CHECK(res.out.find("Unique words") != std::string::npos);
}

TEST_CASE("cli: stats reads tsv when asked") {
  TempDir dir("cli");
  testutil::write_file(dir.file("two.tsv"),
                       "The house is big.\tThe house is big.\tNo\n"
                       "A gigantic dog barked.\tA big dog barked.\tYes\n");
  CliResult res = run_cli({"stats", "--data", dir.file("two.tsv"), "--tsv"});
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("Sentences      2") != std::string::npos);
}

TEST_CASE("cli: full workflow over the bundled fixtures") {
  TempDir dir("cli");
  const std::string resources = dir.file("resources");

  CliResult tr = run_cli({"train-resources", "--source", fixture("parallel_source.txt"),
                          "--target", fixture("parallel_target.txt"), "--out", resources,
                          "--em-iterations", "3"});
  REQUIRE(tr.exit_code == 0);
  CHECK(tr.out.find("wrote resources to") != std::string::npos);
  for (const char* name : {"source_lm.json", "target_lm.json", "lexical_table.json",
                           "source_stats.json", "target_stats.json", "manifest.json"}) {
    INFO(name);
    CHECK(std::filesystem::exists(std::filesystem::path(resources) / name));
  }

  CliResult ex = run_cli({"extract", "--data", fixture("annotated.jsonl"), "--resources",
                          resources, "--out", dir.file("features.csv"), "--threads", "4"});
  REQUIRE(ex.exit_code == 0);
  std::string csv = testutil::read_file(dir.file("features.csv"));
  auto lines = split_lines(csv);
  REQUIRE(lines.size() == 51);
  CHECK(lines[0] == "f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,f11,f12,f13,f14,f15,f16,f17,label");

  CliResult tn = run_cli({"train", "--data", fixture("annotated.jsonl"), "--resources",
                          resources, "--classifier", "nb", "--out", dir.file("nb.json")});
  REQUIRE(tn.exit_code == 0);
  CHECK(tn.out.find("trained nb on 50 pairs") != std::string::npos);
  CHECK(tn.out.find("feature means:") != std::string::npos);

  CliResult ts = run_cli({"train", "--data", fixture("annotated.jsonl"), "--resources",
                          resources, "--classifier", "svm", "--out", dir.file("svm.json"),
                          "--epochs", "20"});
  REQUIRE(ts.exit_code == 0);

  CliResult ev = run_cli({"evaluate", "--data", fixture("annotated.jsonl"), "--resources",
                          resources, "--model", dir.file("nb.json")});
  REQUIRE(ev.exit_code == 0);
  CHECK(ev.out.find("Human - Naive Bayes Classifier (50 sentences)") != std::string::npos);
  CHECK(ev.out.find("Kappa Statistics") != std::string::npos);
  CHECK(ev.out.find("Mean Absolute Error") != std::string::npos);
  CHECK(ev.out.find("Human \\ Machine") != std::string::npos);
  // Same file the model was trained on: the hash check must warn.
  CHECK(ev.err.find("warning: evaluation data matches the model's training data hash") !=
        std::string::npos);

  CliResult ej = run_cli({"evaluate", "--data", fixture("annotated.jsonl"), "--resources",
                          resources, "--model", dir.file("svm.json"), "--json"});
  REQUIRE(ej.exit_code == 0);
  nlohmann::json report = nlohmann::json::parse(ej.out);
  CHECK(report["kind"] == "eval_report");
  CHECK(report["accuracy"].is_number());
  CHECK(report["confusion"]["yes_yes"].is_number_integer());

  nlohmann::json config = {
      {"simplifier",
       {{"kind", "mock"},
        {"table",
         {{"The committee deliberated for a long time before reaching a verdict.",
           "The committee thought for a long time before deciding."}}}}},
      {"classifier_model", dir.file("nb.json")},
      {"resources", resources},
  };
  testutil::write_file(dir.file("gate.json"), config.dump(2));
  CliResult gate = run_cli({"gate", "--config", dir.file("gate.json"), "--input",
                            fixture("gate_input.txt"), "--out", dir.file("decisions.jsonl")});
  REQUIRE(gate.exit_code == 0);

  auto decision_lines = split_lines(testutil::read_file(dir.file("decisions.jsonl")));
  auto input_lines = split_lines(testutil::read_file(fixture("gate_input.txt")));
  REQUIRE(decision_lines.size() == input_lines.size() + 1);
  for (std::size_t i = 0; i < input_lines.size(); ++i) {
    nlohmann::json d = nlohmann::json::parse(decision_lines[i]);
    CHECK(d["original"] == input_lines[i]);
    CHECK((d["routed"] == d["original"] || d["routed"] == d["simplified"]));
  }
  nlohmann::json summary = nlohmann::json::parse(decision_lines.back());
  CHECK(summary["summary"]["total"] == static_cast<long long>(input_lines.size()));
  CHECK(summary["summary"]["failures"] == 0);
}

TEST_CASE("cli: resource training and extraction are byte-deterministic") {
  TempDir dir("cli");
  REQUIRE(run_cli({"train-resources", "--source", fixture("parallel_source.txt"), "--target",
                   fixture("parallel_target.txt"), "--out", dir.file("r1")})
              .exit_code == 0);
  REQUIRE(run_cli({"train-resources", "--source", fixture("parallel_source.txt"), "--target",
                   fixture("parallel_target.txt"), "--out", dir.file("r2")})
              .exit_code == 0);
  for (const char* name : {"source_lm.json", "target_lm.json", "lexical_table.json",
                           "source_stats.json", "target_stats.json", "manifest.json"}) {
    INFO(name);
    CHECK(testutil::read_file(dir.file("r1") + "/" + name) ==
          testutil::read_file(dir.file("r2") + "/" + name));
  }

  REQUIRE(run_cli({"extract", "--data", fixture("annotated.jsonl"), "--resources",
                   dir.file("r1"), "--out", dir.file("a.csv"), "--threads", "1"})
              .exit_code == 0);
  REQUIRE(run_cli({"extract", "--data", fixture("annotated.jsonl"), "--resources",
                   dir.file("r2"), "--out", dir.file("b.csv"), "--threads", "8"})
              .exit_code == 0);
  CHECK(testutil::read_file(dir.file("a.csv")) == testutil::read_file(dir.file("b.csv")));
}

TEST_CASE("cli: extraction failures surface as data errors") {
  TempDir dir("cli");
  REQUIRE(run_cli({"train-resources", "--source", fixture("parallel_source.txt"), "--target",
                   fixture("parallel_target.txt"), "--out", dir.file("res")})
              .exit_code == 0);
  CliResult res = run_cli({"extract", "--data", fixture("annotated.jsonl"), "--resources",
                           dir.file("missing"), "--out", dir.file("x.csv")});
  CHECK(res.exit_code == 2);
  CHECK_THAT(res.err, Catch::Matchers::StartsWith("error: "));
}
