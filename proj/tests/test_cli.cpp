#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kCli = HYPERLOC_CLI;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("hyperloc-cli-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// One shared synthetic corpus for the pipeline cases.
struct Workspace {
  TempDir dir;
  std::string corpus;
  Workspace() {
    corpus = dir.file("corpus.tsv");
    REQUIRE(run("synth --out " + corpus +
                " --seed 11 --planted 4 --dispersed 6 --background 300"
                " --min-phrase-tweets 40 --max-phrase-tweets 60") == 0);
  }
};

}  // namespace

TEST_CASE("synth writes a corpus, manifest and resolved config") {
  Workspace ws;
  CHECK(fs::exists(ws.corpus));
  CHECK(fs::exists(ws.corpus + ".manifest.tsv"));
  CHECK(fs::exists(ws.corpus + ".config.json"));

  const auto manifest = slurp(ws.corpus + ".manifest.tsv");
  CHECK(manifest.rfind("phrase\tkind\tsource", 0) == 0);
  CHECK(line_count(manifest) == 11);  // header + 4 planted + 6 dispersed

  const auto config = slurp(ws.corpus + ".config.json");
  CHECK(config.find("\"command\": \"synth\"") != std::string::npos);
  CHECK(config.find("\"seed\": 11") != std::string::npos);
}

TEST_CASE("train, predict and evaluate run end to end") {
  Workspace ws;
  const auto registry = ws.dir.file("models.tsv");
  const auto index_dump = ws.dir.file("index.tsv");
  CHECK(run("train --input " + ws.corpus + " --registry-out " + registry +
            " --train-end 2014-03-01 --index-dump " + index_dump + " > /dev/null") == 0);
  REQUIRE(fs::exists(registry));
  CHECK(line_count(slurp(index_dump)) > 10);  // gram \t users \t tweets
  CHECK(slurp(registry).rfind("hyperloc-registry\t1", 0) == 0);
  CHECK(fs::exists(registry + ".config.json"));

  const auto predictions = ws.dir.file("predictions.tsv");
  CHECK(run("predict --input " + ws.corpus + " --registry " + registry + " --out " +
            predictions) == 0);
  const auto pred_text = slurp(predictions);
  CHECK(pred_text.rfind("item_id\tstatus", 0) == 0);
  CHECK(pred_text.find("\tpredicted\t") != std::string::npos);
  CHECK(pred_text.find("\tno_geo_ngram\t") != std::string::npos);

  const auto report = ws.dir.file("report.tsv");
  CHECK(run("evaluate --input " + ws.corpus +
            " --train-end 2014-03-01 --test-start 2014-03-02 --report-out " + report) == 0);
  const auto report_text = slurp(report);
  CHECK(report_text.rfind("train_source\ttest_source", 0) == 0);
  CHECK(line_count(report_text) == 2);
}

TEST_CASE("identical seeds and configs give byte-identical outputs") {
  Workspace ws;
  const auto reg1 = ws.dir.file("r1.tsv");
  const auto reg2 = ws.dir.file("r2.tsv");
  const std::string train_args = "train --input " + ws.corpus + " --train-end 2014-03-01";
  REQUIRE(run(train_args + " --registry-out " + reg1 + " > /dev/null") == 0);
  REQUIRE(run(train_args + " --registry-out " + reg2 + " > /dev/null") == 0);
  CHECK(slurp(reg1) == slurp(reg2));

  const auto rep1 = ws.dir.file("rep1.tsv");
  const auto rep2 = ws.dir.file("rep2.tsv");
  const std::string eval_args = "evaluate --input " + ws.corpus +
                                " --train-end 2014-03-01 --test-start 2014-03-02 --seed 3";
  REQUIRE(run(eval_args + " --report-out " + rep1) == 0);
  REQUIRE(run(eval_args + " --report-out " + rep2) == 0);
  CHECK(slurp(rep1) == slurp(rep2));

  // a rerun of synth with the same seed reproduces the corpus file
  const auto corpus2 = ws.dir.file("corpus2.tsv");
  REQUIRE(run("synth --out " + corpus2 +
              " --seed 11 --planted 4 --dispersed 6 --background 300"
              " --min-phrase-tweets 40 --max-phrase-tweets 60") == 0);
  CHECK(slurp(ws.corpus) == slurp(corpus2));
}

TEST_CASE("sweep emits one monotone row per grid value") {
  Workspace ws;
  const auto report = ws.dir.file("sweep.tsv");
  CHECK(run("sweep --input " + ws.corpus +
            " --train-end 2014-03-01 --test-start 2014-03-02 --vary tau --grid 0.5,0.8"
            " --report-out " + report) == 0);
  const auto text = slurp(report);
  REQUIRE(line_count(text) == 3);

  // coverage is column 10 (0-based 9)
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> coverages;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string field;
    for (int i = 0; i < 10; ++i) std::getline(row, field, '\t');
    coverages.push_back(std::stod(field));
  }
  REQUIRE(coverages.size() == 2);
  CHECK(coverages[0] >= coverages[1]);
}

TEST_CASE("crossmodel and gravity run on tagged corpora") {
  TempDir dir;
  const auto corpus_a = dir.file("a.tsv");
  const auto corpus_b = dir.file("b.tsv");
  REQUIRE(run("synth --out " + corpus_a + " --seed 22 --sources alpha --disjoint-vocab"
              " --planted 3 --dispersed 3 --background 150"
              " --min-phrase-tweets 40 --max-phrase-tweets 60") == 0);
  REQUIRE(run("synth --out " + corpus_b + " --seed 23 --sources beta --disjoint-vocab"
              " --planted 3 --dispersed 3 --background 150"
              " --min-phrase-tweets 40 --max-phrase-tweets 60") == 0);

  const auto report = dir.file("cross.tsv");
  CHECK(run("crossmodel --train alpha=" + corpus_a + " --train beta=" + corpus_b +
            " --test beta=" + corpus_b +
            " --train-end 2014-03-01 --test-start 2014-03-02 --report-out " + report) == 0);
  const auto text = slurp(report);
  CHECK(line_count(text) == 3);
  CHECK(text.find("alpha\tbeta") != std::string::npos);
  CHECK(text.find("beta\tbeta") != std::string::npos);

  const auto grav = dir.file("gravity.tsv");
  CHECK(run("gravity --input alpha=" + corpus_a + " --input beta=" + corpus_b + " --top 5 --out " +
            grav) == 0);
  CHECK(slurp(grav).rfind("gram\tsource", 0) == 0);
  CHECK(line_count(slurp(grav)) >= 2);
}

TEST_CASE("heatmap bins corpus and prediction locations") {
  Workspace ws;
  const auto grid = ws.dir.file("grid.tsv");
  CHECK(run("heatmap --input " + ws.corpus +
            " --lat-min 40.55 --lon-min -74.15 --lat-max 40.95 --lon-max -73.65"
            " --cell-km 5 --out " + grid) == 0);
  const auto text = slurp(grid);
  CHECK(text.rfind("# hyperloc-heatmap\t1", 0) == 0);
  CHECK(text.find("# cell_km\t5") != std::string::npos);

  const auto registry = ws.dir.file("models.tsv");
  REQUIRE(run("train --input " + ws.corpus + " --registry-out " + registry + " > /dev/null") == 0);
  const auto predictions = ws.dir.file("pred.tsv");
  REQUIRE(run("predict --input " + ws.corpus + " --registry " + registry + " --out " +
              predictions) == 0);
  const auto grid2 = ws.dir.file("grid2.tsv");
  CHECK(run("heatmap --input " + predictions + " --points predictions"
            " --lat-min 40.55 --lon-min -74.15 --lat-max 40.95 --lon-max -73.65"
            " --cell-km 5 --sample 50 --out " + grid2) == 0);
  CHECK(slurp(grid2).rfind("# hyperloc-heatmap\t1", 0) == 0);
}

TEST_CASE("predict keeps the header on an empty test corpus") {
  Workspace ws;
  const auto registry = ws.dir.file("models.tsv");
  REQUIRE(run("train --input " + ws.corpus + " --registry-out " + registry + " > /dev/null") == 0);

  const auto empty = ws.dir.file("empty.tsv");
  std::ofstream(empty).close();
  const auto out = ws.dir.file("empty-pred.tsv");
  CHECK(run("predict --input " + empty + " --registry " + registry + " --out " + out) == 0);
  CHECK(slurp(out) == "item_id\tstatus\tlat\tlon\tgram\tcore_area_km2\n");
}

TEST_CASE("failures map to distinct exit codes") {
  TempDir dir;

  // empty training corpus: config error, no registry written
  const auto empty = dir.file("empty.tsv");
  std::ofstream(empty).close();
  const auto registry = dir.file("never.tsv");
  CHECK(run("train --input " + empty + " --registry-out " + registry + " > /dev/null") == 5);
  CHECK_FALSE(fs::exists(registry));

  // missing input file: io error
  CHECK(run("train --input " + dir.file("nope.tsv") + " --registry-out " + registry +
            " > /dev/null") == 3);

  // missing registry: io error
  CHECK(run("predict --input " + empty + " --registry " + dir.file("no-registry.tsv") +
            " --out -") == 3);

  // corrupt registry: parse error
  const auto bad = dir.file("bad-registry.tsv");
  std::ofstream(bad) << "hyperloc-registry\t9\n";
  CHECK(run("predict --input " + empty + " --registry " + bad + " --out -") == 4);

  // bad flag value: config error
  CHECK(run("train --input " + empty + " --registry-out " + registry +
            " --format xml > /dev/null") == 5);

  // usage error from the parser itself
  CHECK(run("train") != 0);
  CHECK(run("no-such-command") != 0);
}
