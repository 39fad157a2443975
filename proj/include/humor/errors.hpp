#pragma once

#include <stdexcept>

namespace humor {

// Base for everything a CLI run reports as a data problem (exit code 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// corpus building
struct EmptyCorpusError : DataError {
  using DataError::DataError;
};
struct DegenerateSplitError : DataError {
  using DataError::DataError;
};
struct TooFewGroupsError : DataError {
  using DataError::DataError;
};

// resource loading
struct MalformedLineError : DataError {
  using DataError::DataError;
};
struct DimensionMismatchError : DataError {
  using DataError::DataError;
};
struct EmptyTableError : DataError {
  using DataError::DataError;
};
struct SimilarityOutOfRangeError : DataError {
  using DataError::DataError;
};

// models
struct SingleClassError : DataError {
  using DataError::DataError;
};
struct WidthMismatchError : DataError {
  using DataError::DataError;
};
struct FilterTooWideError : DataError {
  using DataError::DataError;
};
struct EmptyMapError : DataError {
  using DataError::DataError;
};
struct StaleCacheError : std::logic_error {
  using std::logic_error::logic_error;
};

// evaluation
struct LengthMismatchError : DataError {
  using DataError::DataError;
};
struct EmptyInputError : DataError {
  using DataError::DataError;
};
struct FoldMismatchError : DataError {
  using DataError::DataError;
};

}  // namespace humor
