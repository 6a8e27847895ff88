#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace leafvgg {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor shapes that do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Bad argument or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, degenerate statistics, diverged training.
class NumericError : public Error {
 public:
  using Error::Error;
};

enum class DataErrc {
  missing_path,
  empty_root,
  not_a_directory,
  empty_class,
  unsupported_format,
  corrupt_image,
  bad_manifest,
  io,
};

std::string_view to_string(DataErrc code);

/// Dataset layout and image decoding failures.
class DataError : public Error {
 public:
  DataError(DataErrc code, const std::string& what)
      : Error(what), code_(code) {}
  DataErrc code() const noexcept { return code_; }

 private:
  DataErrc code_;
};

enum class FormatErrc {
  io,
  bad_magic,
  bad_version,
  truncated,
  trailing_data,
  bad_dtype,
  non_finite,
  duplicate_name,
  unknown_name,
  missing_tensor,
  shape_mismatch,
};

std::string_view to_string(FormatErrc code);

/// LEFW1 container problems. `tensor()` names the offending entry when there is one.
class FormatError : public Error {
 public:
  FormatError(FormatErrc code, const std::string& what, std::string tensor = {})
      : Error(what), code_(code), tensor_(std::move(tensor)) {}
  FormatErrc code() const noexcept { return code_; }
  const std::string& tensor() const noexcept { return tensor_; }

 private:
  FormatErrc code_;
  std::string tensor_;
};

}  // namespace leafvgg
