#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "leakwave/acoustics.hpp"

namespace leakwave {

inline constexpr const char* kToolVersion = "0.3.0";

std::string trim(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
/// Whole-string number parsing; throws ConfigurationError on trailing junk.
double parse_double(std::string_view s);
std::int64_t parse_int64(std::string_view s);
/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// 64-bit FNV-1a, printed as 16 hex digits by hash_hex().
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t h);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Comment lines written at the top of every output file.
struct OutputHeader {
  std::string config_hash;           // hex, empty when there is no config
  std::vector<std::string> notes;    // extra "# ..." lines
  std::string to_text() const;
};

/// `#` header, sample rate and start time comments, then "time_s,pressure_pa" rows.
std::string format_trace_csv(const PressureTrace& trace, const OutputHeader& header);
/// Reads format_trace_csv() output; without a sample_rate_hz comment the rate is
/// inferred from the time column, which must be uniform. Throws IoError with the line number.
PressureTrace parse_trace_csv(const std::string& text);

/// Real spectra as "frequency_hz,<value_name>,valid".
std::string format_spectrum_csv(const Spectrum& spectrum, const std::string& value_name, const OutputHeader& header);
Spectrum parse_spectrum_csv(const std::string& text, SpectrumKind kind);

}  // namespace leakwave
