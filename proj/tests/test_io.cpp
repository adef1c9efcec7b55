#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "qwkt/biphoton.hpp"
#include "qwkt/commands.hpp"
#include "qwkt/errors.hpp"
#include "qwkt/io.hpp"

using namespace qwkt;

TEST_CASE("seventeen-digit formatting is lossless") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1e16, 1e16);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(gen) * std::pow(10.0, static_cast<int>(gen() % 60) - 40);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("spectrum files round-trip") {
  const auto src = BiphotonSource::from_bandwidth_nm(20.0);
  const auto grid = FrequencyGrid::for_source(src, 64);
  std::vector<double> v(64);
  for (std::size_t j = 0; j < 64; ++j) v[j] = std::exp(-0.01 * j) / 3.0;
  const SpectralPattern p(grid, v, SpectrumKind::ideal_density);

  auto file = io::from_pattern(p, io::SpectrumSchema::omega_intensity, 405e-9);
  file.comments.push_back("omega in rad/s");
  const auto text = io::render_spectrum(file);
  const auto parsed = io::parse_spectrum(text);
  CHECK(parsed.abscissa == file.abscissa);
  CHECK(parsed.values == file.values);
  CHECK(parsed.comments == file.comments);
  CHECK(io::render_spectrum(parsed) == text);
  const auto back = io::to_pattern(parsed, 405e-9);
  CHECK(back.grid().size() == 64);
  CHECK(back.grid().step() == doctest::Approx(grid.step()).epsilon(1e-12));
  CHECK(std::vector<double>(back.intensity().begin(), back.intensity().end()) == v);
}

TEST_CASE("wavelength schema converts to difference frequency") {
  const auto src = BiphotonSource::from_bandwidth_nm(20.0);
  const auto grid = FrequencyGrid::for_source(src, 256);
  std::vector<double> v(256);
  for (std::size_t j = 0; j < 256; ++j) v[j] = static_cast<double>(j % 17);
  const SpectralPattern p(grid, v, SpectrumKind::counts);
  const auto file = io::from_pattern(p, io::SpectrumSchema::wavelength_counts, 405e-9);
  CHECK(file.abscissa.front() < 810.0);
  CHECK(file.abscissa.back() > 810.0);
  const auto parsed = io::parse_spectrum(io::render_spectrum(file));
  CHECK(parsed.kind == SpectrumKind::counts);
  const auto back = io::to_pattern(parsed, 405e-9);
  for (std::size_t j = 0; j < 256; ++j) {
    CHECK(back.grid()[j] == doctest::Approx(grid[j]).epsilon(1e-6));
    CHECK(back.intensity()[j] == v[j]);
  }
}

TEST_CASE("spectrum file errors") {
  CHECK_THROWS_AS(io::parse_spectrum(""), InputError);
  CHECK_THROWS_AS(io::parse_spectrum("# only a comment\n"), InputError);
  CHECK_THROWS_AS(io::parse_spectrum("omega_rad_per_s,intensity\n"), InputError);
  CHECK_THROWS_AS(io::parse_spectrum("x,y\n1,2\n"), InputError);
  CHECK_THROWS_AS(io::parse_spectrum("omega_rad_per_s,intensity\n1,2\n1,3\n"), InputError);
  CHECK_THROWS_AS(io::parse_spectrum("omega_rad_per_s,intensity\n1,-2\n"), InputError);
  CHECK_THROWS_AS(io::parse_spectrum("omega_rad_per_s,intensity\n1,abc\n"), InputError);
  CHECK_THROWS_AS(io::parse_spectrum("omega_rad_per_s,intensity\n1,2,3\n"), InputError);
  CHECK_THROWS_AS(io::parse_spectrum("wavelength_nm,counts\n800,2.5\n"), InputError);

  std::string uneven = "omega_rad_per_s,intensity\n";
  for (int i = 0; i < 16; ++i) uneven += std::to_string(-7.5 + i + (i == 5 ? 0.3 : 0.0)) + ",1\n";
  CHECK_THROWS_AS(io::to_pattern(io::parse_spectrum(uneven), 405e-9), InputError);

  std::string shifted = "omega_rad_per_s,intensity\n";
  for (int i = 0; i < 16; ++i) shifted += std::to_string(-7.0 + i) + ",1\n";
  CHECK_THROWS_AS(io::to_pattern(io::parse_spectrum(shifted), 405e-9), InputError);

  std::string odd = "omega_rad_per_s,intensity\n";
  for (int i = 0; i < 17; ++i) odd += std::to_string(-8.0 + i) + ",1\n";
  CHECK_THROWS_AS(io::to_pattern(io::parse_spectrum(odd), 405e-9), InputError);
}

TEST_CASE("atomic write and digest") {
  const auto dir = std::filesystem::temp_directory_path() / "qwkt_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "a.txt";
  io::write_atomic(path, "first");
  io::write_atomic(path, "second");
  CHECK(io::read_text(path) == "second");
  CHECK_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
  CHECK_THROWS_AS(io::read_text(dir / "missing"), InputError);
  std::filesystem::remove_all(dir);

  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("command-line value parsing") {
  const std::vector<std::pair<std::string, double>> ps{{"ps", 1.0}, {"fs", 1e-3}};
  const auto a = cli::parse_axis("0.01:2:50ps", ps);
  REQUIRE(a.size() == 50);
  CHECK(a.front() == 0.01);
  CHECK(a.back() == doctest::Approx(2.0));
  CHECK(cli::parse_axis("1:2:0ps", ps).empty());
  CHECK(cli::parse_axis("100:200:3fs", ps)[1] == doctest::Approx(0.15));
  CHECK_THROWS_AS(cli::parse_axis("1:2", ps), ConfigurationError);
  CHECK_THROWS_AS(cli::parse_axis("1:2:3nm", ps), ConfigurationError);
  CHECK_THROWS_AS(cli::parse_axis("1:2:300ps", ps), ConfigurationError);
  CHECK_THROWS_AS(cli::parse_axis("a:2:3ps", ps), ConfigurationError);

  const auto l = cli::parse_layers("0.120:0.5,0.267:0.5");
  REQUIRE(l.size() == 2);
  CHECK(l[1].first == 0.267);
  CHECK(cli::parse_layers("0.1,0.2")[0].second == 0.5);
  CHECK_THROWS_AS(cli::parse_layers("-0.1"), ConfigurationError);

  CHECK(cli::parse_count("1e6", "--trials") == 1000000);
  CHECK_THROWS_AS(cli::parse_count("0", "--trials"), ConfigurationError);
  CHECK_THROWS_AS(cli::parse_count("1.5", "--trials"), ConfigurationError);
  CHECK(cli::parse_variant("paper-eq16") == DetectionVariant::paper_eq16);
  CHECK_THROWS_AS(cli::parse_variant("eq16"), ConfigurationError);
}
