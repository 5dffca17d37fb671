#include "sifaudit/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "sifaudit/error.hpp"
#include "sifaudit/genmodel.hpp"
#include "sifaudit/matrix_builder.hpp"
#include "sifaudit/statistics.hpp"
#include "sifaudit/svd.hpp"

namespace sifaudit {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  StageTimer(RunReport& report, std::string stage)
      : report_(report), stage_(std::move(stage)), start_(Clock::now()) {}
  ~StageTimer() {
    const std::chrono::duration<double> elapsed = Clock::now() - start_;
    report_.timings_seconds.emplace_back(stage_, elapsed.count());
  }
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  RunReport& report_;
  std::string stage_;
  Clock::time_point start_;
};

std::ifstream open_input(const std::string& path, const char* what) {
  if (path.empty()) raise(ErrorKind::kConfig, std::string("no ") + what + " configured");
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::kConfig, std::string(what) + " not found: " + path);
  return in;
}

std::string cache_key(const PipelineConfig& config) {
  const fs::path corpus = fs::absolute(config.corpus.path);
  std::ostringstream os;
  os << corpus.string() << '|' << fs::file_size(corpus) << '|'
     << fs::last_write_time(corpus).time_since_epoch().count() << '|' << config.corpus.vocab_size
     << '|' << config.corpus.window;
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << std::hash<std::string>{}(os.str());
  return hex.str();
}

CorpusStatistics compute_statistics(const PipelineConfig& config, RunReport* report) {
  CorpusStatistics stats;
  {
    auto in = open_input(config.corpus.path, "corpus");
    std::unique_ptr<StageTimer> timer;
    if (report) timer = std::make_unique<StageTimer>(*report, "build_vocabulary");
    stats.vocab = build_vocabulary(in, config.corpus.vocab_size);
  }
  std::vector<TokenId> ids;
  {
    auto in = open_input(config.corpus.path, "corpus");
    ids = encode(in, stats.vocab);
  }
  stats.corpus_tokens = ids.size();
  std::unique_ptr<StageTimer> timer;
  if (report) timer = std::make_unique<StageTimer>(*report, "count_cooccurrences");
  stats.cooc = count_cooccurrences(ids, static_cast<std::uint32_t>(stats.vocab.size()),
                                   WindowConfig{config.corpus.window}, config.threads);
  return stats;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

nlohmann::json wilcoxon_json(const WilcoxonResult& w) {
  return {{"n_effective", w.n_effective},
          {"w_plus", w.w_plus},
          {"p_one_sided", w.p_one_sided},
          {"method", to_string(w.method)},
          {"degenerate", w.degenerate}};
}

std::string fixed(double x, int decimals) { return format_fixed(x, decimals); }

}  // namespace

std::string format_fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["config"] = config;
  j["results"] = results;
  j["warnings"] = warnings;
  return j;
}

std::string RunReport::to_text() const {
  std::ostringstream os;
  os << "== " << kind << " ==\n";
  if (results.contains("text")) os << results["text"].get<std::string>();
  if (!warnings.empty()) {
    os << "warnings:\n";
    for (const auto& w : warnings) os << "  - " << w << '\n';
  }
  return os.str();
}

void write_report(const RunReport& report, const std::string& dir, const std::string& stem) {
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) raise(ErrorKind::kConfig, "cannot write " + (fs::path(dir) / name).string());
    out << content;
  };
  write(stem + ".json", report.to_json().dump(2) + "\n");
  write(stem + ".txt", report.to_text());
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& [stage, seconds] : report.timings_seconds) timings[stage] = seconds;
  write(stem + ".timings.json", timings.dump(2) + "\n");
  for (const auto& [name, content] : report.attachments) write(name, content);
}

CorpusStatistics load_corpus_statistics(const PipelineConfig& config, RunReport* report) {
  if (config.corpus.path.empty()) raise(ErrorKind::kConfig, "no corpus configured (corpus.path)");
  if (!fs::exists(config.corpus.path)) {
    raise(ErrorKind::kConfig, "corpus not found: " + config.corpus.path);
  }
  const char* cache_env = std::getenv("SIFAUDIT_CACHE_DIR");
  if (cache_env == nullptr || *cache_env == '\0') return compute_statistics(config, report);

  const fs::path cache_dir(cache_env);
  const auto key = cache_key(config);
  const auto vocab_path = cache_dir / (key + ".vocab.tsv");
  const auto cooc_path = cache_dir / (key + ".cooc.bin");
  const auto meta_path = cache_dir / (key + ".tokens");
  if (fs::exists(vocab_path) && fs::exists(cooc_path) && fs::exists(meta_path)) {
    CorpusStatistics stats;
    std::ifstream v(vocab_path);
    stats.vocab = read_vocabulary_tsv(v);
    std::ifstream c(cooc_path, std::ios::binary);
    stats.cooc = read_cooc_binary(c);
    std::ifstream m(meta_path);
    m >> stats.corpus_tokens;
    return stats;
  }
  auto stats = compute_statistics(config, report);
  fs::create_directories(cache_dir);
  {
    std::ofstream v(vocab_path);
    write_vocabulary_tsv(v, stats.vocab);
    std::ofstream c(cooc_path, std::ios::binary);
    write_cooc_binary(c, stats.cooc);
    std::ofstream m(meta_path);
    m << stats.corpus_tokens << '\n';
  }
  return stats;
}

WordBenchmarks load_word_benchmarks(const DatasetManifest& manifest) {
  WordBenchmarks out;
  for (const auto& e : manifest.entries) {
    switch (e.format) {
      case DatasetFormat::kWordSim: out.similarity.push_back(load_wordsim(e.path, e.name)); break;
      case DatasetFormat::kGoogle:
        out.analogy.push_back(load_analogy(e.path, e.name, AnalogySource::kGoogle));
        break;
      case DatasetFormat::kMsr:
        out.analogy.push_back(load_analogy(e.path, e.name, AnalogySource::kMsr));
        break;
      case DatasetFormat::kSts: break;
    }
  }
  return out;
}

nlohmann::json evaluate_word_vectors(const EmbeddingMatrix& vectors, const WordBenchmarks& benchmarks,
                                     AnalogyRule rule, RunReport& report, const std::string& label) {
  nlohmann::json out;
  nlohmann::json sims = nlohmann::json::object();
  for (const auto& ds : benchmarks.similarity) {
    const auto s = eval_similarity(vectors, ds);
    sims[ds.name] = {{"spearman100", s.spearman100}, {"used", s.used}, {"dropped", s.dropped}};
    if (s.dropped > 0) {
      report.warn(label + ": " + ds.name + " dropped " + std::to_string(s.dropped) + " of " +
                  std::to_string(ds.pairs.size()) + " pairs (out of vocabulary)");
    }
  }
  out["similarity_datasets"] = sims;
  if (!benchmarks.similarity.empty()) {
    out["similarity"] = sims[benchmarks.similarity.front().name]["spearman100"];
  }
  if (!benchmarks.analogy.empty()) {
    const auto a = eval_analogy(vectors, benchmarks.analogy, rule);
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [name, t] : a.per_dataset) {
      per[name] = {{"accuracy", t.accuracy()},
                   {"correct", t.correct},
                   {"attempted", t.attempted},
                   {"dropped", t.dropped}};
    }
    out["analogy"] = a.accuracy();
    out["analogy_datasets"] = per;
    out["analogy_attempted"] = a.total.attempted;
    out["analogy_dropped"] = a.total.dropped;
    if (a.total.dropped > 0) {
      report.warn(label + ": analogy dropped " + std::to_string(a.total.dropped) + " of " +
                  std::to_string(a.total.dropped + a.total.attempted) +
                  " questions (out of vocabulary)");
    }
  }
  return out;
}

RunReport run_table1(const PipelineConfig& config) {
  RunReport report;
  report.kind = "table1";
  report.config = to_json(config);

  if (config.datasets.manifest.empty()) {
    raise(ErrorKind::kConfig, "no dataset manifest configured (datasets.manifest)");
  }
  const auto manifest = load_manifest(config.datasets.manifest);
  const auto benchmarks = load_word_benchmarks(manifest);
  if (benchmarks.similarity.empty() || benchmarks.analogy.empty()) {
    raise(ErrorKind::kConfig, config.datasets.manifest +
                                  ": needs at least one wordsim and one google/msr dataset");
  }

  const auto stats = load_corpus_statistics(config, &report);
  const auto vocab = std::make_shared<const Vocabulary>(stats.vocab);
  const auto p = unigram_probabilities(*vocab);
  report.results["corpus"] = {{"tokens", stats.corpus_tokens},
                              {"vocabulary", vocab->size()},
                              {"in_vocabulary_tokens", vocab->total_tokens()},
                              {"cooc_nnz", stats.cooc.nnz()},
                              {"cooc_total_pairs", stats.cooc.total_pairs()}};
  if (vocab->size() < config.corpus.vocab_size) {
    report.warn("corpus has only " + std::to_string(vocab->size()) + " distinct tokens (requested " +
                std::to_string(config.corpus.vocab_size) + ")");
  }

  SvdOptions svd_options{config.svd.rank, config.svd.seed, config.svd.oversample,
                         config.svd.power_iters, config.threads};
  if (svd_options.rank > vocab->size()) {
    report.warn("svd rank " + std::to_string(svd_options.rank) + " reduced to vocabulary size " +
                std::to_string(vocab->size()));
    svd_options.rank = vocab->size();
  }

  auto score_target = [&](const FactorizationTarget& target, const std::string& label) {
    nlohmann::json row;
    row["target"] = describe(target.kind);
    row["clamp"] = target.clamp_negative;
    row["nnz"] = target.matrix.nnz();
    SvdResult svd;
    {
      StageTimer t(report, "svd:" + label);
      svd = truncated_svd(target, svd_options);
    }
    std::vector<double> top(svd.S.data(), svd.S.data() + std::min<Eigen::Index>(5, svd.S.size()));
    row["top_singular_values"] = top;
    const auto embeddings = extract_embeddings(svd, config.svd.weighting, vocab);
    StageTimer t(report, "eval:" + label);
    row["scores"] = evaluate_word_vectors(embeddings, benchmarks, config.datasets.analogy_rule,
                                          report, label);
    return row;
  };

  nlohmann::json pmi_row;
  {
    FactorizationTarget target;
    {
      StageTimer t(report, "build:pmi");
      target = build_shifted_pmi(stats.cooc, config.pmi.k, config.pmi.clamp);
    }
    pmi_row = score_target(target, "PMI");
  }

  nlohmann::json m_row;
  double chosen_log_z = config.m_matrix.log_z;
  if (config.m_matrix.grid.empty()) {
    FactorizationTarget target;
    {
      StageTimer t(report, "build:m");
      target = build_m_matrix(stats.cooc, p, config.m_matrix.a, config.m_matrix.log_z,
                              config.m_matrix.clamp);
    }
    m_row = score_target(target, "M");
  } else {
    nlohmann::json grid = nlohmann::json::array();
    double best = -std::numeric_limits<double>::infinity();
    for (double log_z : config.m_matrix.grid) {
      const auto target =
          build_m_matrix(stats.cooc, p, config.m_matrix.a, log_z, config.m_matrix.clamp);
      if (target.matrix.nnz() == 0) {
        report.warn("log_z=" + fixed(log_z, 3) + ": M matrix has no positive cell; skipped");
        grid.push_back({{"log_z", log_z}, {"skipped", true}});
        continue;
      }
      auto row = score_target(target, "M(log_z=" + fixed(log_z, 3) + ")");
      const double objective = 0.5 * (row["scores"]["similarity"].get<double>() +
                                      row["scores"]["analogy"].get<double>());
      grid.push_back({{"log_z", log_z},
                      {"similarity", row["scores"]["similarity"]},
                      {"analogy", row["scores"]["analogy"]},
                      {"objective", objective}});
      if (objective > best) {
        best = objective;
        chosen_log_z = log_z;
        m_row = std::move(row);
      }
    }
    if (m_row.is_null()) raise(ErrorKind::kDegenerate, "every log_z in the grid gave an empty M matrix");
    report.results["m_grid"] = grid;
    report.results["m_grid_selected_log_z"] = chosen_log_z;
  }

  const double pmi_sim = pmi_row["scores"]["similarity"].get<double>();
  const double pmi_ana = pmi_row["scores"]["analogy"].get<double>();
  const double m_sim = m_row["scores"]["similarity"].get<double>();
  const double m_ana = m_row["scores"]["analogy"].get<double>();
  report.results["table"] = nlohmann::json::array(
      {{{"matrix", "M"}, {"similarity", m_sim}, {"analogy", m_ana}, {"log_z", chosen_log_z}},
       {{"matrix", "PMI"}, {"similarity", pmi_sim}, {"analogy", pmi_ana}}});
  report.results["details"] = {{"M", m_row}, {"PMI", pmi_row}};
  report.results["ordering"] = {{"pmi_ge_m_similarity", pmi_sim >= m_sim},
                                {"pmi_ge_m_analogy", pmi_ana >= m_ana}};

  std::ostringstream text;
  text << std::left << std::setw(8) << "Matrix" << std::right << std::setw(12) << "Similarity"
       << std::setw(12) << "Analogy" << '\n';
  text << std::left << std::setw(8) << "M" << std::right << std::setw(12) << fixed(m_sim, 2)
       << std::setw(12) << fixed(m_ana, 2) << '\n';
  text << std::left << std::setw(8) << "PMI" << std::right << std::setw(12) << fixed(pmi_sim, 2)
       << std::setw(12) << fixed(pmi_ana, 2) << '\n';
  report.results["text"] = text.str();
  return report;
}

Vocabulary load_frequency_source(const PipelineConfig& config, RunReport& report) {
  if (!config.sentemb.freq_table.empty()) {
    auto in = open_input(config.sentemb.freq_table, "frequency table");
    return read_vocabulary_tsv(in);
  }
  if (!config.corpus.path.empty()) {
    report.warn("no frequency table configured; SIF weights use corpus counts from " +
                config.corpus.path);
    auto in = open_input(config.corpus.path, "corpus");
    const auto counts = count_tokens(in);
    if (counts.empty()) raise(ErrorKind::kEmptyCorpus, "corpus contains no tokens");
    return Vocabulary::from_counts(counts, counts.size());
  }
  raise(ErrorKind::kConfig,
        "SIF needs a frequency table (sentemb.freq_table) or a corpus (corpus.path)");
}

namespace {

struct StsInputs {
  std::vector<StsDataset> datasets;
  Vocabulary frequencies;
};

StsInputs load_sts_inputs(const PipelineConfig& config, RunReport& report, bool need_frequencies) {
  if (config.datasets.manifest.empty()) {
    raise(ErrorKind::kConfig, "no dataset manifest configured (datasets.manifest)");
  }
  if (config.sentemb.vectors.empty()) {
    raise(ErrorKind::kConfig, "no word vectors configured ([vectors.<name>] path = ...)");
  }
  for (const auto& v : config.sentemb.vectors) {
    if (!fs::exists(v.path)) raise(ErrorKind::kConfig, "word vector file not found: " + v.path);
  }
  StsInputs inputs;
  if (need_frequencies) inputs.frequencies = load_frequency_source(config, report);
  const auto manifest = load_manifest(config.datasets.manifest);
  for (const auto* e : manifest.of_format(DatasetFormat::kSts)) {
    inputs.datasets.push_back(load_sts(e->path, e->gold, e->name));
    if (inputs.datasets.back().unscored > 0) {
      report.warn(e->name + ": skipped " + std::to_string(inputs.datasets.back().unscored) +
                  " pairs without a gold score");
    }
  }
  if (inputs.datasets.empty()) {
    raise(ErrorKind::kConfig, config.datasets.manifest + ": no sts datasets listed");
  }
  return inputs;
}

void note_sts_coverage(RunReport& report, const std::string& label, const std::string& dataset,
                       const StsScore& s) {
  if (s.dropped_pairs > 0) {
    report.warn(label + " " + dataset + ": dropped " + std::to_string(s.dropped_pairs) +
                " pairs with no in-vocabulary token");
  }
  if (s.zero_sentences > 0) {
    report.warn(label + " " + dataset + ": " + std::to_string(s.zero_sentences) +
                " sentences embedded as zero vectors");
  }
}

}  // namespace

RunReport run_sts(const PipelineConfig& config) {
  RunReport report;
  report.kind = "sts";
  report.config = to_json(config);
  auto inputs = load_sts_inputs(config, report, /*need_frequencies=*/true);

  std::size_t pcr = config.sentemb.pcr_components;
  if (pcr == 0) {
    report.warn("sentemb.pcr_components = 0; PCR conditions use 1 component");
    pcr = 1;
  }
  struct Condition {
    const char* name;
    SentenceMethod method;
    std::size_t pcr;
  };
  const Condition conditions[] = {{"Avg", SentenceMethod::kAvg, 0},
                                  {"SIF", SentenceMethod::kSif, 0},
                                  {"Avg+PCR", SentenceMethod::kAvg, pcr},
                                  {"SIF+PCR", SentenceMethod::kSif, pcr}};

  std::ostringstream text;
  nlohmann::json per_vectors = nlohmann::json::object();
  for (const auto& spec : config.sentemb.vectors) {
    EmbeddingMatrix vectors;
    {
      StageTimer t(report, "load:" + spec.name);
      vectors = load_word_vectors(spec.path, spec.format);
    }
    const auto aligned = align_frequencies(vectors, inputs.frequencies);
    if (aligned.missing > 0) {
      report.warn(spec.name + ": " + std::to_string(aligned.missing) +
                  " vocabulary words have no frequency entry (weighted as p = 0)");
    }
    std::map<std::string, std::vector<double>> scores;
    nlohmann::json cond_json = nlohmann::json::object();
    std::ostringstream csv;
    csv << "condition,dataset,score\n";
    {
      StageTimer t(report, "sts:" + spec.name);
      for (const auto& cond : conditions) {
        SentenceEmbeddingConfig sc;
        sc.method = cond.method;
        sc.a = config.sentemb.a;
        sc.pcr_components = cond.pcr;
        sc.oov_policy = config.sentemb.oov_policy;
        sc.centered_pcr = config.sentemb.centered_pcr;
        nlohmann::json per_dataset = nlohmann::json::object();
        for (const auto& ds : inputs.datasets) {
          const auto s = eval_sts(ds, vectors, aligned.p, sc);
          if (cond.method == SentenceMethod::kAvg && cond.pcr == 0) {
            note_sts_coverage(report, spec.name, ds.name, s);
          }
          scores[cond.name].push_back(s.pearson100);
          per_dataset[ds.name] = s.pearson100;
          csv << cond.name << ',' << ds.name << ',' << std::setprecision(17) << s.pearson100 << '\n';
        }
        cond_json[cond.name] = {{"datasets", per_dataset}, {"mean", mean(scores[cond.name])}};
      }
    }
    const auto w_pcr = wilcoxon_one_sided(scores["SIF+PCR"], scores["Avg+PCR"]);
    const auto w_raw = wilcoxon_one_sided(scores["SIF"], scores["Avg"]);
    per_vectors[spec.name] = {
        {"conditions", cond_json},
        {"wilcoxon", {{"sif_pcr_vs_avg_pcr", wilcoxon_json(w_pcr)}, {"sif_vs_avg", wilcoxon_json(w_raw)}}},
        {"sif_mean_exceeds_avg", mean(scores["SIF"]) > mean(scores["Avg"])},
        {"sif_pcr_mean_exceeds_avg_pcr", mean(scores["SIF+PCR"]) > mean(scores["Avg+PCR"])},
        {"missing_frequencies", aligned.missing}};
    report.attachments["boxplot_" + spec.name + ".csv"] = csv.str();

    text << spec.name << '\n';
    for (const auto& cond : conditions) {
      text << "  " << std::left << std::setw(8) << cond.name << std::right << std::setw(10)
           << fixed(mean(scores[cond.name]), 2) << "  (mean Pearson x100 over "
           << inputs.datasets.size() << " datasets)\n";
    }
    text << "  Wilcoxon SIF+PCR > Avg+PCR: p = " << fixed(w_pcr.p_one_sided, 6) << " ("
         << to_string(w_pcr.method) << ", n = " << w_pcr.n_effective << ")\n";
  }
  nlohmann::json names = nlohmann::json::array();
  for (const auto& ds : inputs.datasets) names.push_back(ds.name);
  report.results["datasets"] = names;
  report.results["vectors"] = per_vectors;
  report.results["text"] = text.str();
  return report;
}

RunReport run_eval_sts(const PipelineConfig& config, const SentenceEmbeddingConfig& condition) {
  RunReport report;
  report.kind = "eval-sts";
  report.config = to_json(config);
  report.config["condition"] = {{"method", to_string(condition.method)},
                                {"a", condition.a},
                                {"pcr_components", condition.pcr_components},
                                {"oov_policy", to_string(condition.oov_policy)},
                                {"centered_pcr", condition.centered_pcr}};
  const bool sif = condition.method == SentenceMethod::kSif;
  auto inputs = load_sts_inputs(config, report, sif);
  std::ostringstream text;
  nlohmann::json per_vectors = nlohmann::json::object();
  for (const auto& spec : config.sentemb.vectors) {
    const auto vectors = load_word_vectors(spec.path, spec.format);
    std::vector<double> p;
    if (sif) p = align_frequencies(vectors, inputs.frequencies).p;
    nlohmann::json per_dataset = nlohmann::json::object();
    std::vector<double> all;
    for (const auto& ds : inputs.datasets) {
      const auto s = eval_sts(ds, vectors, p, condition);
      note_sts_coverage(report, spec.name, ds.name, s);
      per_dataset[ds.name] = {{"pearson100", s.pearson100},
                              {"scored_pairs", s.scored_pairs},
                              {"dropped_pairs", s.dropped_pairs},
                              {"oov_tokens", s.oov_tokens}};
      all.push_back(s.pearson100);
      text << spec.name << ' ' << ds.name << ' ' << fixed(s.pearson100, 2) << '\n';
    }
    per_vectors[spec.name] = {{"datasets", per_dataset}, {"mean", mean(all)}};
  }
  report.results["vectors"] = per_vectors;
  report.results["text"] = text.str();
  return report;
}

RunReport run_audit(const PipelineConfig& config) {
  RunReport report;
  report.kind = "audit";
  report.config = to_json(config);
  std::ostringstream text;

  nlohmann::json bounds = nlohmann::json::array();
  bool increasing = true;
  double previous = -1.0;
  for (auto n : config.audit.n_values) {
    const auto b = genmodel::alpha_lower_bound(n, config.audit.weight_high);
    bounds.push_back({{"n", b.n},
                      {"weight_low", b.weight_low},
                      {"weight_high", b.weight_high},
                      {"z_lower_bound", b.z_lower_bound},
                      {"alpha_min", b.alpha_min},
                      {"alpha_min_8dp", fixed(b.alpha_min, 8)},
                      {"unigram_residual", b.unigram_residual}});
    if (b.alpha_min <= previous) increasing = false;
    previous = b.alpha_min;
    text << "n = " << n << ": alpha >= " << fixed(b.alpha_min, 8) << '\n';
  }
  report.results["alpha_bounds"] = bounds;
  report.results["alpha_min_strictly_increasing"] = increasing;

  // Linearization gap on a fixed toy mixture model.
  const auto model = genmodel::make_toy_genmodel(config.audit.seed, 10, 50);
  const std::vector<TokenId> sentence{3, 17, 29, 41, 8};
  const auto gap = genmodel::linearization_gap(sentence, model, 1.0);
  const auto near = genmodel::linearization_gap(sentence, model, 1e-6);
  report.results["linearization"] = {
      {"model", {{"seed", config.audit.seed}, {"dim", 10}, {"n", 50}, {"alpha", model.alpha()},
                 {"beta", model.beta()}, {"sentence", sentence}}},
      {"ell_at_zero", gap.ell_at_zero},
      {"linear_value_at_cstar", gap.linear_value_at_cstar},
      {"true_value_at_cstar", gap.true_value_at_cstar},
      {"gap", gap.gap},
      {"gap_at_radius_1e-6", near.gap}};
  text << "linearization gap at |c~| = 1: " << gap.gap << " (at 1e-6: " << near.gap << ")\n";

  // Same model at the alpha lower bound for its n: nearly context-blind.
  {
    const auto b = genmodel::alpha_lower_bound(model.n(), config.audit.weight_high);
    genmodel::GenModelParams unigram_like(model.word_vectors(), model.p(), b.alpha_min, model.beta(),
                                          model.c0());
    const auto g = genmodel::linearization_gap(sentence, unigram_like, 1.0);
    report.results["linearization_at_alpha_min"] = {{"alpha", b.alpha_min},
                                                    {"gap", g.gap},
                                                    {"ell_at_zero", g.ell_at_zero},
                                                    {"true_value_at_cstar", g.true_value_at_cstar}};
  }

  genmodel::MapOracleOptions options;
  options.steps = config.audit.steps;
  options.step_size = config.audit.step_size;
  const auto oracle_for = [&](std::uint64_t seed) {
    const auto toy = genmodel::make_toy_model(seed);
    options.seed = seed;
    return genmodel::sif_map_oracle(toy.sentence, toy.sif, options);
  };
  const auto main = oracle_for(config.audit.seed);
  report.results["map_oracle"] = {{"seed", config.audit.seed},
                                  {"cosine", main.cosine},
                                  {"linearized_deviation", main.linearized_deviation},
                                  {"iterations", main.iterations},
                                  {"converged", main.converged},
                                  {"warning", main.warning}};
  if (!main.converged) report.warn("map oracle: " + main.warning);
  nlohmann::json sweep = nlohmann::json::array();
  std::size_t above = 0;
  for (std::size_t s = 0; s < config.audit.toy_models; ++s) {
    const auto r = oracle_for(s);
    if (r.cosine >= 0.95) ++above;
    sweep.push_back({{"seed", s}, {"cosine", r.cosine}, {"converged", r.converged}});
  }
  report.results["map_oracle_sweep"] = {{"runs", sweep},
                                        {"at_least_0_95", above},
                                        {"total", config.audit.toy_models}};
  text << "MAP oracle cosine (seed " << config.audit.seed << "): " << fixed(main.cosine, 6) << '\n';
  text << "MAP oracle cosine >= 0.95 in " << above << "/" << config.audit.toy_models << " toy models\n";
  report.results["text"] = text.str();
  return report;
}

}  // namespace sifaudit
