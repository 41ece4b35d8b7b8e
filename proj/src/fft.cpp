#include "specfault/spectrum.hpp"

#include "specfault/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace specfault {

void fft_inplace(std::span<std::complex<double>> data)
{
    const std::size_t n = data.size();
    if (n == 0 || !std::has_single_bit(n))
        throw InvalidArgument("FFT length must be a power of two, got " + std::to_string(n));

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(data[i], data[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const double theta = -2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t k = 0; k < half; ++k) {
            // Twiddles are evaluated directly rather than by recurrence so the
            // rounding error does not grow with the butterfly index.
            const std::complex<double> w = std::polar(1.0, theta * static_cast<double>(k));
            for (std::size_t start = 0; start < n; start += len) {
                const std::complex<double> even = data[start + k];
                const std::complex<double> odd = w * data[start + k + half];
                data[start + k] = even + odd;
                data[start + k + half] = even - odd;
            }
        }
    }
}

Spectrum::Spectrum(std::vector<double> magnitudes, double bin_width)
    : magnitudes_(std::move(magnitudes)), bin_width_(bin_width)
{
    if (magnitudes_.size() != kSpectrumBins)
        throw InvalidArgument("spectrum must have 512 bins, got " + std::to_string(magnitudes_.size()));
    if (!(bin_width > 0.0) || !std::isfinite(bin_width))
        throw InvalidArgument("bin width must be positive");
    for (std::size_t k = 0; k < magnitudes_.size(); ++k) {
        if (!(magnitudes_[k] >= 0.0) || !std::isfinite(magnitudes_[k]))
            throw DataError("spectrum bin " + std::to_string(k) + " is negative or non-finite");
    }
}

double Spectrum::max() const { return *std::max_element(magnitudes_.begin(), magnitudes_.end()); }

Spectrum fft_magnitude(std::span<const double> window, double sample_rate)
{
    if (window.size() != kFftSize)
        throw InvalidArgument("FFT window must hold 1024 samples, got " + std::to_string(window.size()));
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
        throw InvalidArgument("sample rate must be positive");

    std::vector<std::complex<double>> buf(kFftSize);
    for (std::size_t i = 0; i < kFftSize; ++i) {
        if (!std::isfinite(window[i]))
            throw DataError("non-finite sample at index " + std::to_string(i));
        buf[i] = window[i];
    }
    fft_inplace(buf);

    std::vector<double> mags(kSpectrumBins);
    for (std::size_t k = 0; k < kSpectrumBins; ++k)
        mags[k] = std::abs(buf[k]);
    return Spectrum(std::move(mags), sample_rate / static_cast<double>(kFftSize));
}

} // namespace specfault
