#pragma once

#include "floqsmat/slowmod.hpp"
#include "floqsmat/smatrix.hpp"

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace floqsmat {

// Shortest round-trip text for a double; the column formats below all go through it.
std::string format_real(double x);

// Columns: nu, T, then S_k_re[k], S_k_im[k] for each k in the spectrum window.
void write_transmission_csv(std::ostream& out, const SidebandSpectrum& spectrum);
// Long format heatmap: nu, k, abs_S.
void write_sidebands_csv(std::ostream& out, const SidebandSpectrum& spectrum);
// Columns: delta, S1_re, S1_im, S2_re, S2_im, Sc_abs.
void write_two_photon_csv(std::ostream& out, const TwoPhotonConnectedGrid& grid);
// Columns: nu, G0, G1.
void write_slowmod_csv(std::ostream& out, std::span<const double> nu, std::span<const double> g0,
                       std::span<const double> g1);

// Writes through a temporary file in the same directory and renames it into place.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace floqsmat
