#include "sifaudit/error.hpp"

namespace sifaudit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kDataFormat: return "data-format";
    case ErrorKind::kDecode: return "decode";
    case ErrorKind::kIndex: return "index";
    case ErrorKind::kEmptyCorpus: return "empty-corpus";
    case ErrorKind::kCoverage: return "coverage";
    case ErrorKind::kDegenerate: return "degenerate";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kParameter:
      return 1;
    case ErrorKind::kDataFormat:
    case ErrorKind::kDecode:
    case ErrorKind::kIndex:
      return 2;
    case ErrorKind::kEmptyCorpus:
    case ErrorKind::kCoverage:
    case ErrorKind::kDegenerate:
      return 3;
  }
  return 1;
}

void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace sifaudit
