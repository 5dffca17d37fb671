// sifaudit: corpus -> matrices -> SVD -> word benchmarks, sentence embeddings
// on STS, and the analytical audit of the SIF generative model.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sifaudit/config.hpp"
#include "sifaudit/cooccurrence.hpp"
#include "sifaudit/corpus.hpp"
#include "sifaudit/error.hpp"
#include "sifaudit/matrix_builder.hpp"
#include "sifaudit/pipeline.hpp"
#include "sifaudit/svd.hpp"

namespace fs = std::filesystem;
using namespace sifaudit;

namespace {

// Flags become "key=value" overrides applied after --config, in command-line
// order; explicit --set assignments come last.
struct CommandState {
  std::string config_path;
  std::vector<std::string> overrides;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, CommandState& st) {
  sub->add_option("--config", st.config_path, "Pipeline config file")->check(CLI::ExistingFile);
  sub->add_option("--set", st.sets, "Override a config key: section.key=value");
}

CLI::Option* add_key(CLI::App* sub, const std::string& flag, const std::string& key,
                     CommandState& st, const std::string& help) {
  return sub->add_option_function<std::string>(
      flag, [&st, key](const std::string& v) { st.overrides.push_back(key + "=" + v); }, help);
}

PipelineConfig resolve_config(const CommandState& st) {
  PipelineConfig config = st.config_path.empty() ? PipelineConfig{} : load_config(st.config_path);
  for (const auto& o : st.overrides) apply_override(config, o);
  for (const auto& s : st.sets) apply_override(config, s);
  return config;
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, mode);
  if (!out) raise(ErrorKind::kConfig, "cannot write " + path);
  return out;
}

std::ifstream open_existing(const std::string& path, const char* what,
                            std::ios::openmode mode = std::ios::in) {
  if (path.empty()) raise(ErrorKind::kConfig, std::string("missing ") + what + " path");
  std::ifstream in(path, mode);
  if (!in) raise(ErrorKind::kConfig, std::string(what) + " not found: " + path);
  return in;
}

std::string default_path(const PipelineConfig& config, const std::string& given,
                         const std::string& name) {
  return given.empty() ? (fs::path(config.output_dir) / name).string() : given;
}

void emit(const RunReport& report, const PipelineConfig& config, const std::string& stem) {
  write_report(report, config.output_dir, stem);
  std::cout << report.to_text();
  std::cout << "report: " << (fs::path(config.output_dir) / (stem + ".json")).string() << '\n';
}

Vocabulary read_vocab_file(const std::string& path) {
  auto in = open_existing(path, "vocabulary");
  return read_vocabulary_tsv(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sifaudit: PMI/M factorization, SIF sentence embeddings, and model audit"};
  app.require_subcommand(1);

  // build-vocab
  CommandState vocab_st;
  std::string vocab_out;
  auto* build_vocab = app.add_subcommand("build-vocab", "Count a corpus and write token<TAB>count");
  add_common(build_vocab, vocab_st);
  add_key(build_vocab, "--corpus", "corpus.path", vocab_st, "Corpus text file");
  add_key(build_vocab, "--vocab-size", "corpus.vocab_size", vocab_st, "Vocabulary cap");
  build_vocab->add_option("--out", vocab_out, "Output TSV (default <output.dir>/vocab.tsv)");

  // build-cooc
  CommandState cooc_st;
  std::string cooc_vocab, cooc_out, cooc_tsv;
  auto* build_cooc = app.add_subcommand("build-cooc", "Count windowed co-occurrences");
  add_common(build_cooc, cooc_st);
  add_key(build_cooc, "--corpus", "corpus.path", cooc_st, "Corpus text file");
  add_key(build_cooc, "--vocab-size", "corpus.vocab_size", cooc_st, "Vocabulary cap");
  add_key(build_cooc, "--window", "corpus.window", cooc_st, "Context radius");
  add_key(build_cooc, "--threads", "run.threads", cooc_st, "Counting threads");
  build_cooc->add_option("--vocab", cooc_vocab, "Existing vocabulary TSV (else built from corpus)");
  build_cooc->add_option("--out", cooc_out, "Binary output (default <output.dir>/cooc.bin)");
  build_cooc->add_option("--tsv", cooc_tsv, "Also write a TSV debug dump");

  // build-matrix
  CommandState matrix_st;
  std::string matrix_cooc, matrix_vocab, matrix_out, matrix_kind = "pmi";
  auto* build_matrix = app.add_subcommand("build-matrix", "Build a shifted-PMI or M target");
  add_common(build_matrix, matrix_st);
  build_matrix->add_option("--cooc", matrix_cooc, "Co-occurrence binary")->required();
  build_matrix->add_option("--vocab", matrix_vocab, "Vocabulary TSV (needed for --kind m)");
  build_matrix->add_option("--kind", matrix_kind, "pmi | m")->check(CLI::IsMember({"pmi", "m"}));
  add_key(build_matrix, "--k", "pmi.k", matrix_st, "PMI shift k");
  add_key(build_matrix, "--a", "m_matrix.a", matrix_st, "M-matrix a");
  add_key(build_matrix, "--log-z", "m_matrix.log_z", matrix_st, "M-matrix log Z");
  add_key(build_matrix, "--clamp", "", matrix_st, "Drop values <= 0 (true|false)");
  build_matrix->add_option("--out", matrix_out, "Binary output (default <output.dir>/<kind>.bin)");

  // factorize
  CommandState fact_st;
  std::string fact_matrix, fact_vocab, fact_out;
  auto* factorize = app.add_subcommand("factorize", "Truncated SVD to word2vec-format vectors");
  add_common(factorize, fact_st);
  factorize->add_option("--matrix", fact_matrix, "Matrix binary")->required();
  factorize->add_option("--vocab", fact_vocab, "Vocabulary TSV")->required();
  add_key(factorize, "--rank", "svd.rank", fact_st, "Rank");
  add_key(factorize, "--seed", "svd.seed", fact_st, "Random seed");
  add_key(factorize, "--oversample", "svd.oversample", fact_st, "Extra sketch columns");
  add_key(factorize, "--power-iters", "svd.power_iters", fact_st, "Subspace iterations");
  add_key(factorize, "--weighting", "svd.weighting", fact_st, "half | full | none");
  add_key(factorize, "--threads", "run.threads", fact_st, "Threads");
  factorize->add_option("--out", fact_out, "Vectors (default <output.dir>/vectors.txt)");

  // eval-words
  CommandState words_st;
  std::string words_vectors, words_format = "auto";
  auto* eval_words = app.add_subcommand("eval-words", "Score word vectors on similarity and analogy");
  add_common(eval_words, words_st);
  eval_words->add_option("--vectors", words_vectors, "Word vectors (GloVe or word2vec text)")->required();
  eval_words->add_option("--vector-format", words_format, "auto | glove | word2vec");
  add_key(eval_words, "--manifest", "datasets.manifest", words_st, "Dataset manifest");
  add_key(eval_words, "--analogy-rule", "datasets.analogy_rule", words_st, "3cosadd | 3cosmul");
  add_key(eval_words, "--out", "output.dir", words_st, "Report directory");

  // eval-sts
  CommandState sts_eval_st;
  std::string sts_method = "sif";
  auto* eval_sts_cmd = app.add_subcommand("eval-sts", "Score one sentence-embedding condition on STS");
  add_common(eval_sts_cmd, sts_eval_st);
  add_key(eval_sts_cmd, "--vectors", "", sts_eval_st, "name=path of word vectors (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_key(eval_sts_cmd, "--freq", "sentemb.freq_table", sts_eval_st, "Frequency table token<TAB>count");
  add_key(eval_sts_cmd, "--manifest", "datasets.manifest", sts_eval_st, "Dataset manifest");
  add_key(eval_sts_cmd, "--a", "sentemb.a", sts_eval_st, "SIF constant a");
  add_key(eval_sts_cmd, "--pcr", "sentemb.pcr_components", sts_eval_st, "Components to remove");
  add_key(eval_sts_cmd, "--oov-policy", "sentemb.oov_policy", sts_eval_st, "skip | zero");
  add_key(eval_sts_cmd, "--out", "output.dir", sts_eval_st, "Report directory");
  eval_sts_cmd->add_option("--method", sts_method, "avg | sif")->check(CLI::IsMember({"avg", "sif"}));

  // audit
  CommandState audit_st;
  auto* audit = app.add_subcommand("audit", "Alpha bound, linearization gap, MAP oracle");
  add_common(audit, audit_st);
  add_key(audit, "--n", "audit.n_values", audit_st, "Comma-separated vocabulary sizes");
  add_key(audit, "--seed", "audit.seed", audit_st, "Toy model seed");
  add_key(audit, "--out", "output.dir", audit_st, "Report directory");

  // run-table1
  CommandState t1_st;
  auto* table1 = app.add_subcommand("run-table1", "Corpus -> {PMI, M} -> SVD -> word benchmarks");
  add_common(table1, t1_st);
  add_key(table1, "--corpus", "corpus.path", t1_st, "Corpus text file");
  add_key(table1, "--manifest", "datasets.manifest", t1_st, "Dataset manifest");
  add_key(table1, "--vocab-size", "corpus.vocab_size", t1_st, "Vocabulary cap");
  add_key(table1, "--window", "corpus.window", t1_st, "Context radius");
  add_key(table1, "--rank", "svd.rank", t1_st, "SVD rank");
  add_key(table1, "--seed", "svd.seed", t1_st, "SVD seed");
  add_key(table1, "--log-z", "m_matrix.log_z", t1_st, "M-matrix log Z");
  add_key(table1, "--grid", "m_matrix.grid", t1_st, "Comma-separated log Z grid");
  add_key(table1, "--a", "m_matrix.a", t1_st, "M-matrix a");
  add_key(table1, "--threads", "run.threads", t1_st, "Threads");
  add_key(table1, "--out", "output.dir", t1_st, "Report directory");

  // run-sts
  CommandState rs_st;
  auto* run_sts_cmd = app.add_subcommand("run-sts", "{Avg, SIF} x {PCR off, on} on STS + Wilcoxon");
  add_common(run_sts_cmd, rs_st);
  add_key(run_sts_cmd, "--vectors", "", rs_st, "name=path of word vectors (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_key(run_sts_cmd, "--freq", "sentemb.freq_table", rs_st, "Frequency table token<TAB>count");
  add_key(run_sts_cmd, "--manifest", "datasets.manifest", rs_st, "Dataset manifest");
  add_key(run_sts_cmd, "--a", "sentemb.a", rs_st, "SIF constant a");
  add_key(run_sts_cmd, "--pcr", "sentemb.pcr_components", rs_st, "Components to remove");
  add_key(run_sts_cmd, "--out", "output.dir", rs_st, "Report directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  // Options registered with an empty key carry their own key in the value.
  auto fix_keys = [](CommandState& st, const std::string& key_for_empty) {
    for (auto& o : st.overrides) {
      if (o.front() == '=') o = key_for_empty + o;
    }
  };

  try {
    if (*build_vocab) {
      const auto config = resolve_config(vocab_st);
      std::ifstream in = open_existing(config.corpus.path, "corpus", std::ios::binary);
      const auto vocab = build_vocabulary(in, config.corpus.vocab_size);
      const auto path = default_path(config, vocab_out, "vocab.tsv");
      auto out = open_output(path);
      write_vocabulary_tsv(out, vocab);
      std::cout << "vocabulary: " << vocab.size() << " tokens, " << vocab.total_tokens()
                << " in-vocabulary occurrences -> " << path << '\n';
    } else if (*build_cooc) {
      const auto config = resolve_config(cooc_st);
      Vocabulary vocab;
      if (!cooc_vocab.empty()) {
        vocab = read_vocab_file(cooc_vocab);
      } else {
        auto in = open_existing(config.corpus.path, "corpus", std::ios::binary);
        vocab = build_vocabulary(in, config.corpus.vocab_size);
      }
      auto in = open_existing(config.corpus.path, "corpus", std::ios::binary);
      const auto ids = encode(in, vocab);
      const auto cooc = count_cooccurrences(ids, static_cast<std::uint32_t>(vocab.size()),
                                            WindowConfig{config.corpus.window}, config.threads);
      const auto path = default_path(config, cooc_out, "cooc.bin");
      auto out = open_output(path, std::ios::binary);
      write_cooc_binary(out, cooc);
      if (!cooc_tsv.empty()) {
        auto tsv = open_output(cooc_tsv);
        write_cooc_tsv(tsv, cooc, &vocab);
      }
      std::cout << "co-occurrences: " << cooc.nnz() << " cells, " << cooc.total_pairs()
                << " pairs -> " << path << '\n';
    } else if (*build_matrix) {
      for (auto& o : matrix_st.overrides) {
        if (o.front() == '=') o = (matrix_kind == "pmi" ? "pmi.clamp" : "m_matrix.clamp") + o;
      }
      const auto config = resolve_config(matrix_st);
      auto in = open_existing(matrix_cooc, "co-occurrence file", std::ios::binary);
      const auto cooc = read_cooc_binary(in);
      FactorizationTarget target;
      if (matrix_kind == "pmi") {
        target = build_shifted_pmi(cooc, config.pmi.k, config.pmi.clamp);
      } else {
        if (matrix_vocab.empty()) raise(ErrorKind::kConfig, "--kind m needs --vocab");
        const auto vocab = read_vocab_file(matrix_vocab);
        target = build_m_matrix(cooc, unigram_probabilities(vocab), config.m_matrix.a,
                                config.m_matrix.log_z, config.m_matrix.clamp);
      }
      const auto path = default_path(config, matrix_out, matrix_kind + ".bin");
      auto out = open_output(path, std::ios::binary);
      write_target_binary(out, target);
      std::cout << describe(target.kind) << ": " << target.matrix.nnz() << " stored cells -> "
                << path << '\n';
    } else if (*factorize) {
      const auto config = resolve_config(fact_st);
      auto in = open_existing(fact_matrix, "matrix file", std::ios::binary);
      const auto target = read_target_binary(in);
      auto vocab = std::make_shared<const Vocabulary>(read_vocab_file(fact_vocab));
      if (vocab->size() != target.n()) {
        raise(ErrorKind::kDataFormat, "vocabulary size does not match matrix dimension");
      }
      const SvdOptions options{config.svd.rank, config.svd.seed, config.svd.oversample,
                               config.svd.power_iters, config.threads};
      const auto svd = truncated_svd(target, options);
      const auto embeddings = extract_embeddings(svd, config.svd.weighting, vocab);
      const auto path = default_path(config, fact_out, "vectors.txt");
      auto out = open_output(path);
      write_word2vec_text(out, embeddings);
      std::cout << "rank-" << svd.rank << " embeddings (" << to_string(config.svd.weighting)
                << ") -> " << path << '\n';
    } else if (*eval_words) {
      const auto config = resolve_config(words_st);
      if (config.datasets.manifest.empty()) raise(ErrorKind::kConfig, "missing --manifest");
      const auto vectors = load_word_vectors(words_vectors, parse_vector_format(words_format));
      const auto benchmarks = load_word_benchmarks(load_manifest(config.datasets.manifest));
      RunReport report;
      report.kind = "eval-words";
      report.config = to_json(config);
      report.config["vectors"] = words_vectors;
      const auto scores =
          evaluate_word_vectors(vectors, benchmarks, config.datasets.analogy_rule, report, "vectors");
      report.results = scores;
      std::ostringstream text;
      for (const auto& [name, s] : scores["similarity_datasets"].items()) {
        text << name << " spearman x100: " << format_fixed(s["spearman100"].get<double>(), 2) << '\n';
      }
      if (scores.contains("analogy")) {
        text << "analogy accuracy %: " << format_fixed(scores["analogy"].get<double>(), 2) << '\n';
      }
      report.results["text"] = text.str();
      emit(report, config, "eval_words");
    } else if (*eval_sts_cmd) {
      fix_keys(sts_eval_st, "vectors");
      for (auto& o : sts_eval_st.overrides) {
        // bare path: name the set after the file stem
        if (o.rfind("vectors=", 0) == 0) {
          const auto value = o.substr(8);
          const auto eq = value.find('=');
          o = eq == std::string::npos ? "vectors." + fs::path(value).stem().string() + "=" + value
                                      : "vectors." + value;
        }
      }
      const auto config = resolve_config(sts_eval_st);
      SentenceEmbeddingConfig condition;
      condition.method = parse_sentence_method(sts_method);
      condition.a = config.sentemb.a;
      condition.pcr_components = config.sentemb.pcr_components;
      condition.oov_policy = config.sentemb.oov_policy;
      condition.centered_pcr = config.sentemb.centered_pcr;
      emit(run_eval_sts(config, condition), config, "eval_sts");
    } else if (*audit) {
      const auto config = resolve_config(audit_st);
      emit(run_audit(config), config, "audit");
    } else if (*table1) {
      const auto config = resolve_config(t1_st);
      emit(run_table1(config), config, "table1");
    } else if (*run_sts_cmd) {
      fix_keys(rs_st, "vectors");
      for (auto& o : rs_st.overrides) {
        if (o.rfind("vectors=", 0) == 0) {
          const auto value = o.substr(8);
          const auto eq = value.find('=');
          o = eq == std::string::npos ? "vectors." + fs::path(value).stem().string() + "=" + value
                                      : "vectors." + value;
        }
      }
      const auto config = resolve_config(rs_st);
      emit(run_sts(config), config, "sts");
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error (config): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
