#pragma once

#include <stdexcept>
#include <string>

namespace efcp {

// Bad arguments or malformed data supplied by the caller.
class invalid_input_error : public std::invalid_argument {
 public:
  explicit invalid_input_error(const std::string& what) : std::invalid_argument(what) {}
};

// Data whose variance structure is too thin for the requested analysis
// (e.g. a rank-zero covariance in a PCA-based test).
class degenerate_data_error : public std::runtime_error {
 public:
  explicit degenerate_data_error(const std::string& what) : std::runtime_error(what) {}
};

// Internal numerical failure (non-convergence where convergence is required,
// geometry outside the supported regime, ...).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace efcp
