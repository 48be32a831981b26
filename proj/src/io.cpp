#include "leakwave/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "leakwave/errors.hpp"

namespace leakwave {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(std::string_view s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigurationError("not a number: '" + t + "'");
  }
  return v;
}

std::int64_t parse_int64(std::string_view s) {
  const std::string t = trim(s);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigurationError("not an integer: '" + t + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

std::string OutputHeader::to_text() const {
  std::string out = std::string("# leakwave ") + kToolVersion;
  if (!config_hash.empty()) out += " config_hash=" + config_hash;
  out += '\n';
  for (const auto& n : notes) out += "# " + n + '\n';
  return out;
}

std::string format_trace_csv(const PressureTrace& trace, const OutputHeader& header) {
  std::string out = header.to_text();
  out += "# sample_rate_hz=" + format_double(trace.sample_rate) + '\n';
  out += "# start_time_s=" + format_double(trace.start_time) + '\n';
  out += "time_s,pressure_pa\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += format_double(trace.time_at(i));
    out += ',';
    out += format_double(trace.samples[i]);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool starts_with(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

PressureTrace parse_trace_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  double fs = 0.0, t0 = 0.0;
  bool have_t0 = false;
  std::vector<double> times, samples;
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      try {
        if (starts_with(body, "sample_rate_hz=")) fs = parse_double(body.substr(15));
        if (starts_with(body, "start_time_s=")) {
          t0 = parse_double(body.substr(13));
          have_t0 = true;
        }
      } catch (const Error&) {
        throw IoError("trace line " + std::to_string(line_no) + ": malformed header value");
      }
      continue;
    }
    if (line == "time_s,pressure_pa") continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2) throw IoError("trace line " + std::to_string(line_no) + ": expected 2 columns");
    try {
      times.push_back(parse_double(cells[0]));
      samples.push_back(parse_double(cells[1]));
    } catch (const Error&) {
      throw IoError("trace line " + std::to_string(line_no) + ": malformed number");
    }
  }
  if (samples.empty()) throw IoError("trace: no samples");
  if (!have_t0) t0 = times.front();
  if (fs <= 0.0) {
    if (times.size() < 2) throw IoError("trace: cannot infer the sample rate from one sample");
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (std::abs(times[i] - times[i - 1] - dt) > 1e-6 * dt) {
        throw IoError("trace: non-uniform time column near sample " + std::to_string(i));
      }
    }
    fs = 1.0 / dt;
  }
  try {
    return PressureTrace(std::move(samples), fs, t0);
  } catch (const Error& e) {
    throw IoError(std::string("trace: ") + e.what());
  }
}

std::string format_spectrum_csv(const Spectrum& spectrum, const std::string& value_name, const OutputHeader& header) {
  std::string out = header.to_text();
  out += "frequency_hz," + value_name + ",valid\n";
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    out += format_double(spectrum.frequencies[i]);
    out += ',';
    out += spectrum.valid[i] ? format_double(spectrum.real_at(i)) : std::string("nan");
    out += spectrum.valid[i] ? ",1\n" : ",0\n";
  }
  return out;
}

Spectrum parse_spectrum_csv(const std::string& text, SpectrumKind kind) {
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::vector<double> freqs;
  std::vector<cdouble> values;
  std::vector<bool> valid;
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (!header_seen && starts_with(line, "frequency_hz")) {
      header_seen = true;
      continue;
    }
    if (cells.size() != 3) throw IoError("spectrum line " + std::to_string(line_no) + ": expected 3 columns");
    try {
      freqs.push_back(parse_double(cells[0]));
      const bool ok = parse_int64(cells[2]) != 0;
      valid.push_back(ok);
      values.emplace_back(ok ? parse_double(cells[1]) : 0.0, 0.0);
    } catch (const Error&) {
      throw IoError("spectrum line " + std::to_string(line_no) + ": malformed row");
    }
  }
  Spectrum s(std::move(freqs), std::move(values), kind);
  s.valid = std::move(valid);
  return s;
}

}  // namespace leakwave
