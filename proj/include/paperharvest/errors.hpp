#pragma once

#include <stdexcept>
#include <string>

namespace paperharvest {

// Bad caller input (empty query text, malformed URL, mismatched dimensions).
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidUrlError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

// Labeled data violates a labeling contract (e.g. zero or two homepages per query).
struct InvalidLabelingError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

// Training data cannot produce a model (single-class, empty pair list).
struct DegenerateTrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Query not present in a fixture file.
struct NotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Live backend failed after retries; carries the last HTTP status.
struct BackendError : std::runtime_error {
  int http_status;
  explicit BackendError(const std::string& msg, int status = 0)
      : std::runtime_error(msg), http_status(status) {}
};

// Rate limit exceeded; the caller may retry later.
struct ThrottledError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnparseableDocumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoTitleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace paperharvest
