#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "expect.hpp"
#include "oracles.hpp"
#include "sifaudit/config.hpp"
#include "sifaudit/datasets.hpp"
#include "sifaudit/embeddings.hpp"

using namespace sifaudit;
namespace fs = std::filesystem;

TEST_CASE("word vector formats") {
  std::istringstream glove("The 1 2\ncat 3 4\nthe 9 9\n");
  const auto g = read_word_vectors(glove);
  CHECK(g.size() == 2);
  CHECK(g.dim() == 2);
  CHECK(g.row(*g.find("the"))(1) == 2.0);

  std::istringstream w2v("2 3\na 1 0 0\nb 0 0 0\n");
  const auto w = read_word_vectors(w2v);
  CHECK(w.size() == 2);
  CHECK(w.zero_rows() == 1);
  const auto unit = w.normalized();
  CHECK(unit.row(0).norm() == doctest::Approx(1.0));
  CHECK(unit.row(1).norm() == 0.0);

  std::ostringstream out;
  write_word2vec_text(out, w);
  std::istringstream again(out.str());
  CHECK(read_word_vectors(again, VectorFormat::kWord2Vec).vectors() == w.vectors());

  std::istringstream ragged("a 1 2\nb 1\n");
  CHECK(oracle::error_kind([&] { read_word_vectors(ragged); }) == ErrorKind::kDataFormat);
  CHECK(oracle::error_kind([] { load_word_vectors("/nonexistent/vectors.txt"); }) == ErrorKind::kConfig);
}

TEST_CASE("dataset readers") {
  std::istringstream ws("# header\nWord 1\tWord 2\tHuman (mean)\nTiger\tcat\t7.35\nbook paper 7.46\n");
  const auto w = read_wordsim(ws, "ws");
  REQUIRE(w.pairs.size() == 2);
  CHECK(w.pairs[0].word1 == "tiger");
  CHECK(w.pairs[1].human_score == 7.46);

  std::istringstream google(": capital\nAthens Greece Baghdad Iraq\n: family\nboy girl boy girl\n");
  const auto g = read_analogy(google, "g", AnalogySource::kGoogle);
  REQUIRE(g.questions.size() == 1);
  CHECK(g.questions[0].section == "capital");
  CHECK(g.questions[0].expected == "iraq");
  CHECK(g.rejected == 1);

  std::istringstream msr("good better rough # rougher\n");
  const auto m = read_analogy(msr, "msr", AnalogySource::kMsr);
  REQUIRE(m.questions.size() == 1);
  CHECK(m.questions[0].expected == "rougher");

  std::istringstream sts("A cat.\tA dog.\t3.5\nx\ty\t\n");
  const auto s = read_sts(sts, nullptr, "s");
  CHECK(s.pairs.size() == 1);
  CHECK(s.unscored == 1);

  std::istringstream pairs("a\tb\nc\td\n");
  std::istringstream gold("4.0\n1\n");
  CHECK(read_sts(pairs, &gold, "s").pairs[1].gold == 1.0);

  std::istringstream bad("a\tb\t7\n");
  CHECK(oracle::error_kind([&] { read_sts(bad, nullptr, "s"); }) == ErrorKind::kDataFormat);
}

TEST_CASE("config files and overrides") {
  oracle::TempDir dir("config");
  const auto path = dir.write("c.ini",
                              "# comment\n[corpus]\npath = data/text8\nvocab_size = 1000\n"
                              "; other comment\n[svd]\nrank = 50\nweighting = full\n"
                              "[vectors.glove]\npath = /abs/glove.txt\nformat = glove\n"
                              "[audit]\nn_values = 1, 1e3, 1e5\n");
  auto c = load_config(path);
  CHECK(c.corpus.path == (dir.path() / "data/text8").string());
  CHECK(c.corpus.vocab_size == 1000);
  CHECK(c.corpus.window == 5);
  CHECK(c.svd.rank == 50);
  CHECK(c.svd.weighting == SigmaWeighting::kFull);
  REQUIRE(c.sentemb.vectors.size() == 1);
  CHECK(c.sentemb.vectors[0].format == VectorFormat::kGlove);
  CHECK(c.audit.n_values == std::vector<std::uint64_t>{1, 1000, 100000});

  apply_override(c, "svd.rank=10");
  apply_override(c, "vectors.sgns=/x/sgns.txt");
  CHECK(c.svd.rank == 10);
  CHECK(c.sentemb.vectors.size() == 2);
  CHECK(oracle::error_kind([&] { apply_override(c, "svd.colour=red"); }) == ErrorKind::kConfig);
  CHECK(oracle::error_kind([&] { apply_override(c, "svd.rank=ten"); }) == ErrorKind::kConfig);
  CHECK(oracle::error_kind([&] { apply_override(c, "norank"); }) == ErrorKind::kConfig);

  const auto inline_comments = dir.write(
      "inline.ini", "[svd]\nweighting = none   # half | full | none\nrank = 20 ; small\n"
                    "[corpus]\npath = \"with # hash.txt\"\n");
  const auto ic = load_config(inline_comments);
  CHECK(ic.svd.weighting == SigmaWeighting::kNone);
  CHECK(ic.svd.rank == 20);
  CHECK(fs::path(ic.corpus.path).filename() == "with # hash.txt");

  const auto bad = dir.write("bad.ini", "[corpus]\nwindoww = 3\n");
  CHECK(oracle::error_kind([&] { load_config(bad); }) == ErrorKind::kConfig);
  CHECK(to_json(PipelineConfig{})["svd"]["rank"] == 200);
}

TEST_CASE("manifest") {
  oracle::TempDir dir("manifest");
  dir.write("ws.tsv", "a b 1\n");
  const auto ok = dir.write("m.ini", "[ws]\nformat = wordsim\npath = ws.tsv\n");
  const auto m = load_manifest(ok);
  REQUIRE(m.entries.size() == 1);
  CHECK(m.of_format(DatasetFormat::kWordSim).size() == 1);
  const auto missing = dir.write("m2.ini", "[ws]\nformat = wordsim\npath = nowhere.tsv\n");
  try {
    load_manifest(missing);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfig);
    CHECK(std::string(e.what()).find("nowhere.tsv") != std::string::npos);
  }
  const auto bad_format = dir.write("m3.ini", "[ws]\nformat = csv\npath = ws.tsv\n");
  CHECK(oracle::error_kind([&] { load_manifest(bad_format); }) == ErrorKind::kConfig);
}
