#pragma once

#include "specfault/classifier.hpp"
#include "specfault/pca.hpp"
#include "specfault/twodpca.hpp"

#include <filesystem>
#include <iosfwd>

namespace specfault {

// Versioned little-endian binary files. Doubles are stored bit-for-bit, so a
// write/read cycle reproduces every value exactly.
//
//   basis-2d : "SF2DBAS\0" u32 version | matrix mean | vector eigenvalues | matrix basis
//   basis-pca: "SFPCBAS\0" u32 version | f64 contribution | vector mean | vector eigenvalues | matrix components
//   model    : "SFMODEL\0" u32 version | u32 kind | basis block | u64 count | count x {u8 type, u8 has_size, f64 size, matrix}
//
// matrix = u64 rows, u64 cols, rows*cols f64 column-major; vector = u64 n, n f64.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void write_basis(std::ostream& out, const EigenBasis2D& basis);
void write_basis(std::ostream& out, const PcaBasis& basis);
EigenBasis2D read_basis_2d(std::istream& in);
PcaBasis read_basis_pca(std::istream& in);

void write_basis(const std::filesystem::path& path, const EigenBasis2D& basis);
void write_basis(const std::filesystem::path& path, const PcaBasis& basis);
EigenBasis2D read_basis_2d(const std::filesystem::path& path);
PcaBasis read_basis_pca(const std::filesystem::path& path);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

} // namespace specfault
