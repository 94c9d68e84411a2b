#include "aadiff/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <iterator>
#include <system_error>

#include "aadiff/error.hpp"

namespace aadiff {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DecodeError: return "DecodeError";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::EmptyAudio: return "EmptyAudio";
    case Errc::InvalidFps: return "InvalidFps";
    case Errc::IndexError: return "IndexError";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::InvalidWindow: return "InvalidWindow";
    case Errc::FormatError: return "FormatError";
    case Errc::DegenerateEmbedding: return "DegenerateEmbedding";
    case Errc::DimensionError: return "DimensionError";
    case Errc::EmptySchedule: return "EmptySchedule";
    case Errc::ValidationError: return "ValidationError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::DegenerateSeries: return "DegenerateSeries";
    case Errc::WriteError: return "WriteError";
    case Errc::IoError: return "IoError";
  }
  return "Error";
}

namespace io {

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::IoError, "read failed for " + path.string());
  return data;
}

std::string read_text_file(const std::filesystem::path& path) {
  const Bytes data = read_file(path);
  return std::string(data.begin(), data.end());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::WriteError, "cannot open " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(Errc::WriteError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::WriteError, "cannot rename into " + path.string());
  }
}

void write_file_atomic(const std::filesystem::path& path, const Bytes& contents) {
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(contents.data()),
                                           contents.size()));
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error(Errc::WriteError, "cannot format number");
  return std::string(buf.data(), end);
}

}  // namespace io
}  // namespace aadiff
