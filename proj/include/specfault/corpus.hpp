#pragma once

#include "specfault/spectrum.hpp"
#include "specfault/vibration.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <vector>

namespace specfault {

struct CorpusSample {
    FaultClass label;
    LoadCondition load;
    PackedImage image;
    Spectrum spectrum;
};

/// Labeled spectrum images, indexed by (fault type, load).
class Corpus {
public:
    void add(CorpusSample sample);

    const std::vector<CorpusSample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    const CorpusSample& operator[](std::size_t i) const { return samples_[i]; }

    /// Sample indices of one (type, load) group, in insertion order.
    std::span<const std::size_t> group(FaultType type, int load) const;

private:
    std::vector<CorpusSample> samples_;
    std::array<std::array<std::vector<std::size_t>, kLoadCount>, kFaultTypeCount> groups_;
};

/// One raw recording listed in a recordings manifest.
struct RecordingEntry {
    std::filesystem::path path;
    RawFormat format = RawFormat::Float64LE;
    double sample_rate = kDefaultSampleRate;
    FaultClass label;
    LoadCondition load;
};

// Recordings manifest: "# specfault recordings v1" header, then one
// tab-separated line per file: path, format, sample_rate, class, fault_size
// ("-" for NO), load. Relative paths resolve against the manifest directory.
std::vector<RecordingEntry> read_recordings_manifest(const std::filesystem::path& path);
void write_recordings_manifest(const std::filesystem::path& path, std::span<const RecordingEntry> entries);

// Corpus manifest: "# specfault corpus v1" header, then one tab-separated
// line per sample: image (PGM), spectrum (512 x float64-LE), class,
// fault_size, load, bin_width.
void write_corpus(const std::filesystem::path& dir, const std::filesystem::path& manifest, const Corpus& corpus);
Corpus read_corpus(const std::filesystem::path& manifest);

/// Window -> spectrum -> image for every window of a signal.
std::vector<CorpusSample> render_windows(const Signal& signal, std::size_t count, std::size_t rows,
                                         std::size_t cols, std::size_t hop = kDefaultWindow);

std::string format_fault_size(const std::optional<double>& size);
std::optional<double> parse_fault_size(std::string_view text);

} // namespace specfault
