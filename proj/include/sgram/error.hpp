#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sgram {

// Numeric values are shared with the C API status codes in sgram.h.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kEmptyInput = 2,
  kUnbalancedParentheses = 3,
  kDuplicateVariableDeclaration = 4,
  kUndeclaredVariableReference = 5,
  kSyntax = 6,
  kMalformedLinearization = 7,
  kEmptyAfterNormalization = 8,
  kBadArity = 9,
  kReservedCharacter = 10,
  kAdapterTimeout = 11,
  kAdapterCrashed = 12,
  kMalformedModelOutput = 13,
  kEmptyCorpus = 14,
  kUnknownGoldImage = 15,
  kEmptyResults = 16,
  kFileNotFound = 17,
  kIo = 18,
  kParse = 19,
  kInternal = 20,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> offset = std::nullopt)
      : std::runtime_error(message), code_(code), offset_(offset) {}

  ErrorCode code() const { return code_; }

  // Byte offset into the parsed input, when the error came from a parser.
  std::optional<std::size_t> offset() const { return offset_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> offset_;
};

}  // namespace sgram
