#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace specfault {

inline constexpr std::size_t kFftSize = 1024;
inline constexpr std::size_t kSpectrumBins = kFftSize / 2;
inline constexpr std::size_t kImageRows = 420;
inline constexpr std::size_t kImageCols = 560;

/// In-place iterative radix-2 decimation-in-time transform (forward, unscaled).
/// The length must be a power of two.
void fft_inplace(std::span<std::complex<double>> data);

/// Single-sided magnitude spectrum of one 1024-sample window.
class Spectrum {
public:
    Spectrum(std::vector<double> magnitudes, double bin_width);

    std::span<const double> magnitudes() const { return magnitudes_; }
    double bin_width() const { return bin_width_; }
    std::size_t size() const { return magnitudes_.size(); }
    double max() const;

private:
    std::vector<double> magnitudes_;
    double bin_width_;
};

/// |X_k| for k = 0..511 of the unwindowed 1024-point DFT.
Spectrum fft_magnitude(std::span<const double> window, double sample_rate);

using ImageMatrix = Eigen::MatrixXd;

/// Grayscale image, rows x cols, every pixel in [0, 1]. Row 0 is the top row.
class SpectrumImage {
public:
    SpectrumImage() = default;
    explicit SpectrumImage(ImageMatrix pixels);

    const ImageMatrix& pixels() const { return pixels_; }
    Eigen::Index rows() const { return pixels_.rows(); }
    Eigen::Index cols() const { return pixels_.cols(); }

private:
    ImageMatrix pixels_;
};

/// 8-bit quantized image (pixel * 255, rounded). Lossless for the binary
/// images the rasterizer produces; used for corpus storage and PGM export.
class PackedImage {
public:
    PackedImage() = default;
    PackedImage(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> levels);
    static PackedImage pack(const SpectrumImage& image);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::span<const std::uint8_t> levels() const { return levels_; }

    SpectrumImage unpack() const;
    // Writes the image as doubles into `out` (resized if needed).
    void unpack_into(ImageMatrix& out) const;

    friend bool operator==(const PackedImage&, const PackedImage&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> levels_; // row-major
};

/// Column heights (in pixels above the bottom row) the rasterizer draws for a spectrum.
std::vector<int> column_heights(const Spectrum& spectrum, std::size_t rows, std::size_t cols);

/// Renders the auto-scaled amplitude curve as a filled white area on black:
/// every column is lit from the bottom row up to its height, and columns
/// that receive no bin take the height of the straight segment joining their
/// neighbours.
SpectrumImage rasterize_spectrum(const Spectrum& spectrum, std::size_t rows = kImageRows,
                                 std::size_t cols = kImageCols);

/// Same image, produced directly in packed form.
PackedImage rasterize_packed(const Spectrum& spectrum, std::size_t rows = kImageRows,
                             std::size_t cols = kImageCols);

void write_pgm(const std::filesystem::path& path, const PackedImage& image);
PackedImage read_pgm(const std::filesystem::path& path);

/// Raw float64-LE dump of spectrum magnitudes (bin width is not stored).
void write_spectrum(const std::filesystem::path& path, const Spectrum& spectrum);
Spectrum read_spectrum(const std::filesystem::path& path, double bin_width);

} // namespace specfault
