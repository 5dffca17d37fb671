#include "sifaudit/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sifaudit/error.hpp"

namespace sifaudit {
namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

std::string trim(const std::string& s);

// Strips surrounding quotes, or else a trailing "# ..." / "; ..." comment.
std::string clean_value(const std::string& raw) {
  const auto value = trim(raw);
  if (!value.empty() && (value.front() == '"' || value.front() == '\'')) {
    const auto close = value.find(value.front(), 1);
    if (close != std::string::npos) return value.substr(1, close - 1);
  }
  for (std::size_t i = 1; i < value.size(); ++i) {
    if ((value[i] == '#' || value[i] == ';') && (value[i - 1] == ' ' || value[i - 1] == '\t')) {
      return trim(value.substr(0, i));
    }
  }
  return value;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  raise(ErrorKind::kConfig, "config key '" + key + "': expected " + want + ", got '" + value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto t = trim(value);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) bad_value(key, value, "a number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "true or false");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
  std::vector<T> out;
  std::string item;
  std::string body = value;
  if (!body.empty() && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
  std::istringstream is(body);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if constexpr (std::is_same_v<T, std::uint64_t>) {
      // Accept "1e5" style sizes.
      const double d = parse_number<double>(key, item);
      if (d < 1.0 || d != static_cast<double>(static_cast<std::uint64_t>(d))) {
        bad_value(key, item, "a positive integer");
      }
      out.push_back(static_cast<std::uint64_t>(d));
    } else {
      out.push_back(parse_number<T>(key, item));
    }
  }
  return out;
}

std::string resolve(const std::string& value, const fs::path& base) {
  if (value.empty()) return value;
  fs::path p(value);
  if (p.is_absolute() || base.empty()) return p.lexically_normal().string();
  return (base / p).lexically_normal().string();
}

using Setter = std::function<void(PipelineConfig&, const std::string& key, const std::string& value,
                                  const fs::path& base)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"corpus.path", [](auto& c, auto&, auto& v, auto& b) { c.corpus.path = resolve(v, b); }},
      {"corpus.vocab_size",
       [](auto& c, auto& k, auto& v, auto&) { c.corpus.vocab_size = parse_number<std::size_t>(k, v); }},
      {"corpus.window",
       [](auto& c, auto& k, auto& v, auto&) { c.corpus.window = parse_number<std::uint32_t>(k, v); }},
      {"pmi.k", [](auto& c, auto& k, auto& v, auto&) { c.pmi.k = parse_number<double>(k, v); }},
      {"pmi.clamp", [](auto& c, auto& k, auto& v, auto&) { c.pmi.clamp = parse_bool(k, v); }},
      {"m_matrix.a", [](auto& c, auto& k, auto& v, auto&) { c.m_matrix.a = parse_number<double>(k, v); }},
      {"m_matrix.log_z",
       [](auto& c, auto& k, auto& v, auto&) { c.m_matrix.log_z = parse_number<double>(k, v); }},
      {"m_matrix.clamp", [](auto& c, auto& k, auto& v, auto&) { c.m_matrix.clamp = parse_bool(k, v); }},
      {"m_matrix.grid",
       [](auto& c, auto& k, auto& v, auto&) { c.m_matrix.grid = parse_list<double>(k, v); }},
      {"svd.rank", [](auto& c, auto& k, auto& v, auto&) { c.svd.rank = parse_number<std::size_t>(k, v); }},
      {"svd.seed", [](auto& c, auto& k, auto& v, auto&) { c.svd.seed = parse_number<std::uint64_t>(k, v); }},
      {"svd.oversample",
       [](auto& c, auto& k, auto& v, auto&) { c.svd.oversample = parse_number<std::size_t>(k, v); }},
      {"svd.power_iters",
       [](auto& c, auto& k, auto& v, auto&) { c.svd.power_iters = parse_number<std::size_t>(k, v); }},
      {"svd.weighting",
       [](auto& c, auto&, auto& v, auto&) { c.svd.weighting = parse_sigma_weighting(v); }},
      {"datasets.manifest",
       [](auto& c, auto&, auto& v, auto& b) { c.datasets.manifest = resolve(v, b); }},
      {"datasets.analogy_rule",
       [](auto& c, auto&, auto& v, auto&) { c.datasets.analogy_rule = parse_analogy_rule(v); }},
      {"sentemb.a", [](auto& c, auto& k, auto& v, auto&) { c.sentemb.a = parse_number<double>(k, v); }},
      {"sentemb.pcr_components",
       [](auto& c, auto& k, auto& v, auto&) { c.sentemb.pcr_components = parse_number<std::size_t>(k, v); }},
      {"sentemb.oov_policy",
       [](auto& c, auto&, auto& v, auto&) { c.sentemb.oov_policy = parse_oov_policy(v); }},
      {"sentemb.centered_pcr",
       [](auto& c, auto& k, auto& v, auto&) { c.sentemb.centered_pcr = parse_bool(k, v); }},
      {"sentemb.freq_table",
       [](auto& c, auto&, auto& v, auto& b) { c.sentemb.freq_table = resolve(v, b); }},
      {"audit.n_values",
       [](auto& c, auto& k, auto& v, auto&) { c.audit.n_values = parse_list<std::uint64_t>(k, v); }},
      {"audit.weight_high",
       [](auto& c, auto& k, auto& v, auto&) { c.audit.weight_high = parse_number<double>(k, v); }},
      {"audit.seed", [](auto& c, auto& k, auto& v, auto&) { c.audit.seed = parse_number<std::uint64_t>(k, v); }},
      {"audit.toy_models",
       [](auto& c, auto& k, auto& v, auto&) { c.audit.toy_models = parse_number<std::size_t>(k, v); }},
      {"audit.steps", [](auto& c, auto& k, auto& v, auto&) { c.audit.steps = parse_number<std::size_t>(k, v); }},
      {"audit.step_size",
       [](auto& c, auto& k, auto& v, auto&) { c.audit.step_size = parse_number<double>(k, v); }},
      {"output.dir", [](auto& c, auto&, auto& v, auto& b) { c.output_dir = resolve(v, b); }},
      {"run.threads",
       [](auto& c, auto& k, auto& v, auto&) { c.threads = std::max(1U, parse_number<unsigned>(k, v)); }},
  };
  return table;
}

void set_key(PipelineConfig& config, const std::string& key, const std::string& value,
             const fs::path& base) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) raise(ErrorKind::kConfig, "unknown config key '" + key + "'");
  it->second(config, key, clean_value(value), base);
}

void set_vector_set(PipelineConfig& config, const std::string& name, const pt::ptree& section,
                    const fs::path& base) {
  VectorSetSpec spec;
  spec.name = name;
  for (const auto& [key, node] : section) {
    const auto value = clean_value(node.data());
    if (key == "path") {
      spec.path = resolve(value, base);
    } else if (key == "format") {
      spec.format = parse_vector_format(value);
    } else {
      raise(ErrorKind::kConfig, "unknown key '" + key + "' in [vectors." + name + "]");
    }
  }
  if (spec.path.empty()) raise(ErrorKind::kConfig, "[vectors." + name + "] needs a path");
  config.sentemb.vectors.push_back(std::move(spec));
}

pt::ptree read_ini_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::kConfig, "cannot open '" + path + "'");
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    raise(ErrorKind::kConfig, path + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

std::string format_name(VectorFormat f) {
  switch (f) {
    case VectorFormat::kAuto: return "auto";
    case VectorFormat::kGlove: return "glove";
    case VectorFormat::kWord2Vec: return "word2vec";
  }
  return "auto";
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
  const auto tree = read_ini_file(path);
  const fs::path base = fs::path(path).parent_path();
  PipelineConfig config;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty() && body.empty()) {
      raise(ErrorKind::kConfig, "config key '" + section + "' must sit inside a [section]");
    }
    if (section.rfind("vectors.", 0) == 0) {
      set_vector_set(config, section.substr(8), body, base);
      continue;
    }
    for (const auto& [key, node] : body) set_key(config, section + "." + key, node.data(), base);
  }
  return config;
}

void apply_override(PipelineConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    raise(ErrorKind::kConfig, "override '" + assignment + "' must look like section.key=value");
  }
  const auto key = trim(assignment.substr(0, eq));
  const auto value = assignment.substr(eq + 1);
  if (key.rfind("vectors.", 0) == 0) {
    // vectors.<name>=<path>
    pt::ptree section;
    section.put("path", trim(value));
    set_vector_set(config, key.substr(8), section, {});
    return;
  }
  set_key(config, key, value, {});
}

nlohmann::json to_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["corpus"] = {{"path", c.corpus.path}, {"vocab_size", c.corpus.vocab_size}, {"window", c.corpus.window}};
  j["pmi"] = {{"k", c.pmi.k}, {"clamp", c.pmi.clamp}};
  j["m_matrix"] = {{"a", c.m_matrix.a},
                   {"log_z", c.m_matrix.log_z},
                   {"clamp", c.m_matrix.clamp},
                   {"grid", c.m_matrix.grid}};
  j["svd"] = {{"rank", c.svd.rank},
              {"seed", c.svd.seed},
              {"oversample", c.svd.oversample},
              {"power_iters", c.svd.power_iters},
              {"weighting", to_string(c.svd.weighting)}};
  j["datasets"] = {{"manifest", c.datasets.manifest},
                   {"analogy_rule", to_string(c.datasets.analogy_rule)}};
  nlohmann::json vectors = nlohmann::json::array();
  for (const auto& v : c.sentemb.vectors) {
    vectors.push_back({{"name", v.name}, {"path", v.path}, {"format", format_name(v.format)}});
  }
  j["sentemb"] = {{"a", c.sentemb.a},
                  {"pcr_components", c.sentemb.pcr_components},
                  {"oov_policy", to_string(c.sentemb.oov_policy)},
                  {"centered_pcr", c.sentemb.centered_pcr},
                  {"freq_table", c.sentemb.freq_table},
                  {"vectors", vectors}};
  j["audit"] = {{"n_values", c.audit.n_values},
                {"weight_high", c.audit.weight_high},
                {"seed", c.audit.seed},
                {"toy_models", c.audit.toy_models},
                {"steps", c.audit.steps},
                {"step_size", c.audit.step_size}};
  j["output"] = {{"dir", c.output_dir}};
  j["run"] = {{"threads", c.threads}};
  return j;
}

std::vector<const ManifestEntry*> DatasetManifest::of_format(DatasetFormat format) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries) {
    if (e.format == format) out.push_back(&e);
  }
  return out;
}

std::string to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kWordSim: return "wordsim";
    case DatasetFormat::kGoogle: return "google";
    case DatasetFormat::kMsr: return "msr";
    case DatasetFormat::kSts: return "sts";
  }
  return "wordsim";
}

DatasetManifest load_manifest(const std::string& path) {
  const auto tree = read_ini_file(path);
  const fs::path base = fs::path(path).parent_path();
  DatasetManifest manifest;
  for (const auto& [name, body] : tree) {
    ManifestEntry entry;
    entry.name = name;
    std::string format;
    for (const auto& [key, node] : body) {
      const auto value = clean_value(node.data());
      if (key == "format") {
        format = value;
      } else if (key == "path") {
        entry.path = resolve(value, base);
      } else if (key == "gold") {
        entry.gold = resolve(value, base);
      } else {
        raise(ErrorKind::kConfig, path + ": unknown key '" + key + "' in [" + name + "]");
      }
    }
    if (format == "wordsim") {
      entry.format = DatasetFormat::kWordSim;
    } else if (format == "google") {
      entry.format = DatasetFormat::kGoogle;
    } else if (format == "msr") {
      entry.format = DatasetFormat::kMsr;
    } else if (format == "sts") {
      entry.format = DatasetFormat::kSts;
    } else {
      raise(ErrorKind::kConfig, path + ": dataset [" + name +
                                    "] needs format = wordsim | google | msr | sts");
    }
    if (entry.path.empty()) raise(ErrorKind::kConfig, path + ": dataset [" + name + "] needs a path");
    if (!fs::exists(entry.path)) {
      raise(ErrorKind::kConfig, "dataset [" + name + "] file not found: " + entry.path);
    }
    if (!entry.gold.empty() && !fs::exists(entry.gold)) {
      raise(ErrorKind::kConfig, "dataset [" + name + "] gold file not found: " + entry.gold);
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

}  // namespace sifaudit
