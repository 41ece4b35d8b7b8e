#include "specfault/spectrum.hpp"

#include "specfault/error.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace specfault {

SpectrumImage::SpectrumImage(ImageMatrix pixels) : pixels_(std::move(pixels))
{
    if (pixels_.size() == 0)
        throw InvalidArgument("image must not be empty");
    for (Eigen::Index i = 0; i < pixels_.size(); ++i) {
        const double v = pixels_.data()[i];
        if (!(v >= 0.0 && v <= 1.0))
            throw DataError("pixel value outside [0, 1]");
    }
}

PackedImage::PackedImage(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> levels)
    : rows_(rows), cols_(cols), levels_(std::move(levels))
{
    if (rows == 0 || cols == 0 || levels_.size() != rows * cols)
        throw InvalidArgument("packed image buffer does not match its dimensions");
}

PackedImage PackedImage::pack(const SpectrumImage& image)
{
    const auto rows = static_cast<std::size_t>(image.rows());
    const auto cols = static_cast<std::size_t>(image.cols());
    std::vector<std::uint8_t> levels(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = image.pixels()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            levels[r * cols + c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
    }
    return PackedImage(rows, cols, std::move(levels));
}

void PackedImage::unpack_into(ImageMatrix& out) const
{
    out.resize(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (std::size_t r = 0; r < rows_; ++r) {
        const std::uint8_t* row = levels_.data() + r * cols_;
        for (std::size_t c = 0; c < cols_; ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c] / 255.0;
    }
}

SpectrumImage PackedImage::unpack() const
{
    ImageMatrix m;
    unpack_into(m);
    return SpectrumImage(std::move(m));
}

std::vector<int> column_heights(const Spectrum& spectrum, std::size_t rows, std::size_t cols)
{
    if (rows < 2 || cols < 2)
        throw InvalidArgument("image must be at least 2 x 2");
    const auto mags = spectrum.magnitudes();
    const std::size_t bins = mags.size();
    const double peak = spectrum.max();
    const double top = static_cast<double>(rows - 1);

    std::vector<int> height(cols, -1);
    for (std::size_t k = 0; k < bins; ++k) {
        const std::size_t c = k * cols / bins;
        const int level = peak > 0.0 ? static_cast<int>(std::lround(mags[k] / peak * top)) : 0;
        height[c] = std::max(height[c], level);
    }

    // Column 0 always holds bin 0; fill the unmapped columns from the line
    // joining the nearest mapped neighbours (or hold the last one at the edge).
    std::size_t left = 0;
    for (std::size_t c = 1; c < cols; ++c) {
        if (height[c] >= 0) {
            left = c;
            continue;
        }
        std::size_t right = c + 1;
        while (right < cols && height[right] < 0)
            ++right;
        if (right == cols) {
            for (std::size_t j = c; j < cols; ++j)
                height[j] = height[left];
            break;
        }
        const double h0 = height[left];
        const double h1 = height[right];
        for (std::size_t j = c; j < right; ++j) {
            const double t = static_cast<double>(j - left) / static_cast<double>(right - left);
            height[j] = static_cast<int>(std::lround(h0 + (h1 - h0) * t));
        }
        left = right;
        c = right;
    }
    return height;
}

PackedImage rasterize_packed(const Spectrum& spectrum, std::size_t rows, std::size_t cols)
{
    const auto height = column_heights(spectrum, rows, cols);
    std::vector<std::uint8_t> levels(rows * cols, 0);
    for (std::size_t c = 0; c < cols; ++c) {
        const auto h = static_cast<std::size_t>(height[c]);
        for (std::size_t k = 0; k <= h; ++k)
            levels[(rows - 1 - k) * cols + c] = 255;
    }
    return PackedImage(rows, cols, std::move(levels));
}

SpectrumImage rasterize_spectrum(const Spectrum& spectrum, std::size_t rows, std::size_t cols)
{
    return rasterize_packed(spectrum, rows, cols).unpack();
}

void write_pgm(const std::filesystem::path& path, const PackedImage& image)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path.string() + "'");
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    const auto levels = image.levels();
    out.write(reinterpret_cast<const char*>(levels.data()), static_cast<std::streamsize>(levels.size()));
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

PackedImage read_pgm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    const std::vector<char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const std::string name = path.string();

    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n')
                    ++pos;
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_uint = [&]() -> std::size_t {
        skip_space();
        if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos])))
            throw DataError(name + ": malformed PGM header at byte offset " + std::to_string(pos));
        std::size_t v = 0;
        while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos])))
            v = v * 10 + static_cast<std::size_t>(bytes[pos++] - '0');
        return v;
    };

    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw DataError(name + ": not a binary PGM (P5) file");
    pos = 2;
    const std::size_t cols = read_uint();
    const std::size_t rows = read_uint();
    const std::size_t maxval = read_uint();
    if (maxval != 255)
        throw DataError(name + ": only maxval 255 is supported");
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
        throw DataError(name + ": malformed PGM header at byte offset " + std::to_string(pos));
    ++pos;
    if (bytes.size() - pos != rows * cols) {
        throw DataError(name + ": expected " + std::to_string(rows * cols) + " pixel bytes, found " +
                        std::to_string(bytes.size() - pos));
    }
    std::vector<std::uint8_t> levels(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
    return PackedImage(rows, cols, std::move(levels));
}

void write_spectrum(const std::filesystem::path& path, const Spectrum& spectrum)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path.string() + "'");
    static_assert(std::endian::native == std::endian::little, "spectrum files are little-endian");
    const auto mags = spectrum.magnitudes();
    out.write(reinterpret_cast<const char*>(mags.data()), static_cast<std::streamsize>(mags.size_bytes()));
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

Spectrum read_spectrum(const std::filesystem::path& path, double bin_width)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    std::vector<double> mags(kSpectrumBins);
    in.read(reinterpret_cast<char*>(mags.data()), static_cast<std::streamsize>(mags.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(mags.size() * sizeof(double)) || in.peek() != EOF)
        throw DataError(path.string() + ": spectrum file must hold exactly 512 float64 values");
    return Spectrum(std::move(mags), bin_width);
}

} // namespace specfault
