#pragma once

// Spectrum files, plot-ready CSV formatting, atomic writes and digests.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qwkt/spectral.hpp"

namespace qwkt::io {

enum class SpectrumSchema {
  omega_intensity,    ///< header `omega_rad_per_s,intensity`
  wavelength_counts,  ///< header `wavelength_nm,counts`
};

struct SpectrumFile {
  SpectrumSchema schema = SpectrumSchema::omega_intensity;
  SpectrumKind kind = SpectrumKind::ideal_density;
  std::vector<std::string> comments;  ///< without the leading "# "
  std::vector<double> abscissa;       ///< rad/s or nm, strictly increasing
  std::vector<double> values;
};

/// 17 significant digits, the fixed format of every numeric output.
std::string format_double(double v);

/// Parses and validates a spectrum CSV. Comment lines start with '#'; a
/// `# kind: counts` or `# kind: ideal_density` comment sets the kind
/// (default: ideal_density for omega, counts for wavelength). Throws
/// InputError on an empty file, unknown header, malformed row, non-increasing
/// abscissa, negative values, or non-integer counts.
SpectrumFile parse_spectrum(std::string_view text);
std::string render_spectrum(const SpectrumFile& file);

/// Rebuilds the frequency grid from the abscissa. Wavelength files are
/// converted with ω = 2ω_s - ω_p. Throws InputError unless the result is a
/// uniform grid of bin centers, symmetric about zero, within 1e-6 of a step.
SpectralPattern to_pattern(const SpectrumFile& file, double pump_wavelength);

/// Spectrum file for a pattern; wavelength schema lists bins by ascending wavelength.
SpectrumFile from_pattern(const SpectralPattern& pattern, SpectrumSchema schema,
                          double pump_wavelength);

std::string read_text(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);

}  // namespace qwkt::io
