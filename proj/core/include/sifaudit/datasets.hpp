#pragma once

// Word similarity, analogy and STS benchmark files.

#include <iosfwd>
#include <string>
#include <vector>

namespace sifaudit {

struct WordSimPair {
  std::string word1;
  std::string word2;
  double human_score = 0.0;
};

struct WordSimDataset {
  std::string name;
  std::vector<WordSimPair> pairs;
};

enum class AnalogySource { kGoogle, kMsr };

struct AnalogyQuestion {
  std::string a, b, c, expected;
  std::string section;
};

struct AnalogyDataset {
  std::string name;
  AnalogySource source = AnalogySource::kGoogle;
  std::vector<AnalogyQuestion> questions;
  std::size_t rejected = 0;  // lines whose four words were not distinct
};

struct StsPair {
  std::string sentence1;
  std::string sentence2;
  double gold = 0.0;
};

struct StsDataset {
  std::string name;
  std::vector<StsPair> pairs;
  std::size_t unscored = 0;  // pairs with an empty gold field (skipped)
};

/// "word word score" per line, tab or space separated. Lines starting with
/// '#' and a non-numeric header line are skipped. Words are lowercased.
WordSimDataset read_wordsim(std::istream& in, const std::string& name);

/// Google: "a b c d" lines with ": section" headers. MSR: "a b c d" lines
/// (an "a b c # d" layout is also accepted).
AnalogyDataset read_analogy(std::istream& in, const std::string& name, AnalogySource source);

/// "sentence1<TAB>sentence2[<TAB>gold]" lines. When `gold` is given, gold
/// scores are read one per line from it. Scores must lie in [0, 5].
StsDataset read_sts(std::istream& pairs, std::istream* gold, const std::string& name);

WordSimDataset load_wordsim(const std::string& path, const std::string& name);
AnalogyDataset load_analogy(const std::string& path, const std::string& name, AnalogySource source);
StsDataset load_sts(const std::string& path, const std::string& gold_path, const std::string& name);

}  // namespace sifaudit
