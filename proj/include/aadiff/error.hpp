#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aadiff {

enum class Errc {
  DecodeError,
  UnsupportedFormat,
  EmptyAudio,
  InvalidFps,
  IndexError,
  GridMismatch,
  InvalidWindow,
  FormatError,
  DegenerateEmbedding,
  DimensionError,
  EmptySchedule,
  ValidationError,
  ConfigError,
  DegenerateSeries,
  WriteError,
  IoError,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the Errc codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace aadiff
