#include "sifaudit/datasets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "sifaudit/error.hpp"

namespace sifaudit {
namespace {

std::string lower(std::string s) {
  for (auto& ch : s) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return s;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& s, double& out) {
  const auto t = trim(s);
  if (t.empty()) return false;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string field;
  while (is >> field) out.push_back(field);
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::kConfig, "cannot open dataset file '" + path + "'");
  return in;
}

[[noreturn]] void bad_line(const std::string& name, std::size_t line_no, const std::string& why) {
  raise(ErrorKind::kDataFormat, name + " line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

WordSimDataset read_wordsim(std::istream& in, const std::string& name) {
  WordSimDataset ds;
  ds.name = name;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split_fields(t);
    double score = 0.0;
    if (fields.size() < 3 || !parse_double(fields[2], score)) {
      if (ds.pairs.empty() && !header_seen) {
        header_seen = true;
        continue;
      }
      bad_line(name, line_no, "expected 'word word score'");
    }
    ds.pairs.push_back({lower(fields[0]), lower(fields[1]), score});
  }
  if (ds.pairs.empty()) raise(ErrorKind::kDataFormat, name + ": no word pairs");
  return ds;
}

AnalogyDataset read_analogy(std::istream& in, const std::string& name, AnalogySource source) {
  AnalogyDataset ds;
  ds.name = name;
  ds.source = source;
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t[0] == ':') {
      section = trim(t.substr(1));
      continue;
    }
    auto fields = split_fields(t);
    if (fields.size() == 5 && fields[3] == "#") fields.erase(fields.begin() + 3);
    if (fields.size() != 4) bad_line(name, line_no, "expected four words");
    for (auto& f : fields) f = lower(f);
    if (std::unordered_set<std::string>(fields.begin(), fields.end()).size() != 4) {
      ++ds.rejected;
      continue;
    }
    ds.questions.push_back({fields[0], fields[1], fields[2], fields[3], section});
  }
  if (ds.questions.empty()) raise(ErrorKind::kDataFormat, name + ": no analogy questions");
  return ds;
}

StsDataset read_sts(std::istream& pairs, std::istream* gold, const std::string& name) {
  StsDataset ds;
  ds.name = name;
  std::string line;
  std::string gold_line;
  std::size_t line_no = 0;
  while (std::getline(pairs, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() && gold == nullptr) continue;
    const auto fields = split_tabs(line);
    std::string score_text;
    if (gold != nullptr) {
      if (!std::getline(*gold, gold_line)) bad_line(name, line_no, "gold file has fewer lines");
      score_text = gold_line;
    } else {
      if (fields.size() < 3) bad_line(name, line_no, "expected sentence1<TAB>sentence2<TAB>score");
      score_text = fields[2];
    }
    if (fields.size() < 2) bad_line(name, line_no, "expected two tab-separated sentences");
    if (trim(score_text).empty()) {
      ++ds.unscored;
      continue;
    }
    double score = 0.0;
    if (!parse_double(score_text, score)) bad_line(name, line_no, "bad gold score");
    if (score < 0.0 || score > 5.0) bad_line(name, line_no, "gold score outside [0, 5]");
    ds.pairs.push_back({fields[0], fields[1], score});
  }
  if (ds.pairs.empty()) raise(ErrorKind::kDataFormat, name + ": no scored sentence pairs");
  return ds;
}

WordSimDataset load_wordsim(const std::string& path, const std::string& name) {
  auto in = open_or_throw(path);
  return read_wordsim(in, name);
}

AnalogyDataset load_analogy(const std::string& path, const std::string& name, AnalogySource source) {
  auto in = open_or_throw(path);
  return read_analogy(in, name, source);
}

StsDataset load_sts(const std::string& path, const std::string& gold_path, const std::string& name) {
  auto in = open_or_throw(path);
  if (gold_path.empty()) return read_sts(in, nullptr, name);
  auto gold = open_or_throw(gold_path);
  return read_sts(in, &gold, name);
}

}  // namespace sifaudit
