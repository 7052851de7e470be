#include "floqsmat/io.hpp"

#include "floqsmat/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace floqsmat {

std::string format_real(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_transmission_csv(std::ostream& out, const SidebandSpectrum& spectrum) {
  out << "nu,T";
  for (int k = spectrum.k_min; k <= spectrum.k_max; ++k) out << ",S_k_re[" << k << "],S_k_im[" << k << "]";
  out << '\n';
  for (std::size_t i = 0; i < spectrum.nu_grid.size(); ++i) {
    out << format_real(spectrum.nu_grid[i]) << ',' << format_real(spectrum.total[i]);
    for (int k = spectrum.k_min; k <= spectrum.k_max; ++k) {
      const cplx s = spectrum.s(i, k);
      out << ',' << format_real(s.real()) << ',' << format_real(s.imag());
    }
    out << '\n';
  }
}

void write_sidebands_csv(std::ostream& out, const SidebandSpectrum& spectrum) {
  out << "nu,k,abs_S\n";
  for (std::size_t i = 0; i < spectrum.nu_grid.size(); ++i) {
    for (int k = spectrum.k_min; k <= spectrum.k_max; ++k) {
      out << format_real(spectrum.nu_grid[i]) << ',' << k << ',' << format_real(std::abs(spectrum.s(i, k))) << '\n';
    }
  }
}

void write_two_photon_csv(std::ostream& out, const TwoPhotonConnectedGrid& grid) {
  out << "delta,S1_re,S1_im,S2_re,S2_im,Sc_abs\n";
  for (std::size_t i = 0; i < grid.delta_grid.size(); ++i) {
    const cplx a = grid.values_s1[i];
    const cplx b = grid.values_s2[i];
    out << format_real(grid.delta_grid[i]) << ',' << format_real(a.real()) << ',' << format_real(a.imag()) << ','
        << format_real(b.real()) << ',' << format_real(b.imag()) << ',' << format_real(std::abs(a + b)) << '\n';
  }
}

void write_slowmod_csv(std::ostream& out, std::span<const double> nu, std::span<const double> g0,
                       std::span<const double> g1) {
  if (nu.size() != g0.size() || nu.size() != g1.size()) throw GridMismatchError("slowmod columns differ in length");
  out << "nu,G0,G1\n";
  for (std::size_t i = 0; i < nu.size(); ++i) {
    out << format_real(nu[i]) << ',' << format_real(g0[i]) << ',' << format_real(g1[i]) << '\n';
  }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f << contents;
    if (!f) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace floqsmat
