#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sifaudit {

enum class ErrorKind {
  kConfig,       // bad configuration, missing file, bad manifest
  kParameter,    // an argument outside its documented domain
  kDataFormat,   // malformed input file
  kDecode,       // invalid text encoding
  kIndex,        // id out of range
  kEmptyCorpus,
  kCoverage,     // every benchmark item was out of vocabulary
  kDegenerate,   // undefined result (zero variance, zero gradient, ...)
};

std::string_view to_string(ErrorKind kind);

/// Process exit code for an error category: 1 config, 2 data format, 3 degenerate.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DecodeError : public Error {
 public:
  DecodeError(std::size_t byte_offset, const std::string& what)
      : Error(ErrorKind::kDecode, what), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

}  // namespace sifaudit
