#include "qwkt/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qwkt/biphoton.hpp"
#include "qwkt/errors.hpp"
#include "qwkt/grid.hpp"

namespace qwkt::io {

namespace {

constexpr std::string_view kOmegaHeader = "omega_rad_per_s,intensity";
constexpr std::string_view kWavelengthHeader = "wavelength_nm,counts";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw InputError("line " + std::to_string(line) + ": not a finite number: '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SpectrumFile parse_spectrum(std::string_view text) {
  SpectrumFile out;
  bool have_header = false;
  bool have_kind = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      if (body.starts_with("kind:")) {
        const auto kind = trim(body.substr(5));
        if (kind == "counts") {
          out.kind = SpectrumKind::counts;
        } else if (kind == "ideal_density") {
          out.kind = SpectrumKind::ideal_density;
        } else {
          throw InputError("line " + std::to_string(line_no) + ": unknown kind '" + std::string(kind) + "'");
        }
        have_kind = true;
      } else {
        out.comments.emplace_back(body);
      }
      continue;
    }
    if (!have_header) {
      if (line == kOmegaHeader) {
        out.schema = SpectrumSchema::omega_intensity;
      } else if (line == kWavelengthHeader) {
        out.schema = SpectrumSchema::wavelength_counts;
        if (!have_kind) out.kind = SpectrumKind::counts;
      } else {
        throw InputError("line " + std::to_string(line_no) + ": unknown schema header '" + std::string(line) +
                         "'; expected '" + std::string(kOmegaHeader) + "' or '" +
                         std::string(kWavelengthHeader) + "'");
      }
      have_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw InputError("line " + std::to_string(line_no) + ": expected two comma-separated columns");
    }
    const double x = parse_number(line.substr(0, comma), line_no);
    const double y = parse_number(line.substr(comma + 1), line_no);
    if (!out.abscissa.empty() && !(x > out.abscissa.back())) {
      throw InputError("line " + std::to_string(line_no) + ": abscissa must be strictly increasing");
    }
    if (y < 0.0) throw InputError("line " + std::to_string(line_no) + ": negative value");
    if (out.kind == SpectrumKind::counts && y != std::floor(y)) {
      throw InputError("line " + std::to_string(line_no) + ": counts must be integers");
    }
    out.abscissa.push_back(x);
    out.values.push_back(y);
  }
  if (!have_header) throw InputError("spectrum file is empty or has no schema header");
  if (out.abscissa.empty()) throw InputError("spectrum file has no data rows");
  return out;
}

std::string render_spectrum(const SpectrumFile& file) {
  std::string s;
  for (const auto& c : file.comments) s += "# " + c + "\n";
  s += file.kind == SpectrumKind::counts ? "# kind: counts\n" : "# kind: ideal_density\n";
  s += file.schema == SpectrumSchema::omega_intensity ? kOmegaHeader : kWavelengthHeader;
  s += '\n';
  for (std::size_t i = 0; i < file.abscissa.size(); ++i) {
    s += format_double(file.abscissa[i]);
    s += ',';
    s += format_double(file.values[i]);
    s += '\n';
  }
  return s;
}

SpectralPattern to_pattern(const SpectrumFile& file, double pump_wavelength) {
  const std::size_t n = file.abscissa.size();
  std::vector<double> omega(n);
  std::vector<double> values(n);
  if (file.schema == SpectrumSchema::omega_intensity) {
    omega = file.abscissa;
    values = file.values;
  } else {
    // Longer wavelength means lower signal frequency: reverse into ascending ω.
    for (std::size_t i = 0; i < n; ++i) {
      omega[n - 1 - i] = wavelength_to_difference_frequency(file.abscissa[i] / 1e9, pump_wavelength);
      values[n - 1 - i] = file.values[i];
    }
  }
  if (n < 16 || n % 2 != 0) {
    throw InputError("spectrum needs an even number of bins, at least 16 (got " + std::to_string(n) + ")");
  }
  const double step = (omega.back() - omega.front()) / static_cast<double>(n - 1);
  const double slack = 1e-6 * step;
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(omega[j] - (omega.front() + static_cast<double>(j) * step)) > slack) {
      throw InputError("difference-frequency abscissa is not uniform at row " + std::to_string(j + 1));
    }
  }
  if (std::abs(omega.front() + omega.back()) > slack) {
    throw InputError("difference-frequency grid is not symmetric about zero");
  }
  const double half = 0.5 * (omega.back() - omega.front() + step);
  return SpectralPattern(FrequencyGrid(-half, half, n), std::move(values), file.kind);
}

SpectrumFile from_pattern(const SpectralPattern& pattern, SpectrumSchema schema, double pump_wavelength) {
  SpectrumFile out;
  out.schema = schema;
  out.kind = pattern.kind();
  const auto& grid = pattern.grid();
  const auto v = pattern.intensity();
  const std::size_t n = grid.size();
  out.abscissa.resize(n);
  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (schema == SpectrumSchema::omega_intensity) {
      out.abscissa[j] = grid[j];
      out.values[j] = v[j];
    } else {
      out.abscissa[n - 1 - j] = difference_frequency_to_wavelength(grid[j], pump_wavelength) * 1e9;
      out.values[n - 1 - j] = v[j];
    }
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot move output into place at '" + path.string() + "'");
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace qwkt::io
