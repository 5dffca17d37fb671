#pragma once

// Pipeline configuration and dataset manifests. Both use a TOML-like
// "[section]" / "key = value" layout with '#' or ';' comments.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sifaudit/embeddings.hpp"
#include "sifaudit/evaluation.hpp"
#include "sifaudit/genmodel.hpp"
#include "sifaudit/sentemb.hpp"
#include "sifaudit/svd.hpp"

namespace sifaudit {

struct VectorSetSpec {
  std::string name;
  std::string path;
  VectorFormat format = VectorFormat::kAuto;
};

struct PipelineConfig {
  struct Corpus {
    std::string path;
    std::size_t vocab_size = 35000;
    std::uint32_t window = 5;
  } corpus;

  struct Pmi {
    double k = 1.0;
    bool clamp = true;
  } pmi;

  struct M {
    double a = 1e-3;
    double log_z = 13.0;
    bool clamp = true;
    std::vector<double> grid;  // when nonempty, log_z is chosen from here
  } m_matrix;

  struct Svd {
    std::size_t rank = 200;
    std::uint64_t seed = 0;
    std::size_t oversample = 10;
    std::size_t power_iters = 4;
    SigmaWeighting weighting = SigmaWeighting::kHalf;
  } svd;

  struct Datasets {
    std::string manifest;
    AnalogyRule analogy_rule = AnalogyRule::k3CosAdd;
  } datasets;

  struct Sentemb {
    double a = 1e-3;
    std::size_t pcr_components = 1;
    OovPolicy oov_policy = OovPolicy::kSkip;
    bool centered_pcr = false;
    std::string freq_table;
    std::vector<VectorSetSpec> vectors;
  } sentemb;

  struct Audit {
    std::vector<std::uint64_t> n_values{10, 1000, 100000};
    double weight_high = 1e-3;
    std::uint64_t seed = 7;
    std::size_t toy_models = 20;
    std::size_t steps = 2000;
    double step_size = 0.1;
  } audit;

  std::string output_dir = ".";
  unsigned threads = 1;
};

/// Reads a config file on top of the defaults. Unknown sections or keys are
/// config errors. Relative paths resolve against the file's directory.
PipelineConfig load_config(const std::string& path);

/// Applies "section.key=value" overrides (same keys as the file).
void apply_override(PipelineConfig& config, const std::string& assignment);

/// Resolved configuration with every default materialized.
nlohmann::json to_json(const PipelineConfig& config);

enum class DatasetFormat { kWordSim, kGoogle, kMsr, kSts };

struct ManifestEntry {
  std::string name;
  DatasetFormat format = DatasetFormat::kWordSim;
  std::string path;
  std::string gold;  // STS only, optional
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;  // file order

  std::vector<const ManifestEntry*> of_format(DatasetFormat format) const;
};

/// One section per dataset: [name] with keys `format` (wordsim | google |
/// msr | sts), `path` and, for sts, optional `gold`. Missing files are
/// config errors naming the file.
DatasetManifest load_manifest(const std::string& path);

std::string to_string(DatasetFormat format);

}  // namespace sifaudit
