#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace specfault {

/// Bearing health state. Numeric order follows the usual NO/IF/BF/OF
/// target coding (NO = 1 ... OF = 4 when counted from one).
enum class FaultType : std::uint8_t { NO = 0, IF = 1, BF = 2, OF = 3 };

inline constexpr int kFaultTypeCount = 4;

std::string_view to_string(FaultType type);
FaultType parse_fault_type(std::string_view text);

/// Fault type plus defect size in inches. NO never carries a size.
class FaultClass {
public:
    FaultClass() = default;
    FaultClass(FaultType type, std::optional<double> size_in);

    static FaultClass normal() { return {FaultType::NO, std::nullopt}; }

    FaultType type() const { return type_; }
    std::optional<double> size() const { return size_; }

    friend bool operator==(const FaultClass&, const FaultClass&) = default;

private:
    FaultType type_ = FaultType::NO;
    std::optional<double> size_;
};

/// Motor load index 0..3 with its fixed shaft speed.
class LoadCondition {
public:
    LoadCondition() = default;
    explicit LoadCondition(int index);

    int index() const { return index_; }
    double shaft_rpm() const;
    double shaft_hz() const { return shaft_rpm() / 60.0; }

    friend bool operator==(const LoadCondition&, const LoadCondition&) = default;

private:
    int index_ = 0;
};

inline constexpr int kLoadCount = 4;

/// Immutable, labeled, uniformly sampled vibration record.
class Signal {
public:
    Signal(std::vector<double> samples, double sample_rate, FaultClass label, LoadCondition load);

    std::span<const double> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double sample_rate() const { return sample_rate_; }
    const FaultClass& label() const { return label_; }
    const LoadCondition& load() const { return load_; }

private:
    std::vector<double> samples_;
    double sample_rate_;
    FaultClass label_;
    LoadCondition load_;
};

inline constexpr std::size_t kDefaultWindow = 1024;
inline constexpr double kDefaultSampleRate = 12000.0;

/// Splits a signal into fixed-length windows starting at 0, hop, 2*hop, ...
/// Windows are copies and keep the parent's label and load.
std::vector<Signal> segment(const Signal& signal, std::size_t window_len = kDefaultWindow,
                            std::size_t hop = kDefaultWindow);

/// Parameters of the synthetic bearing model. Characteristic frequencies are
/// expressed as orders of the shaft rotation frequency (6205-2RS defaults).
struct SynthParams {
    double sample_rate = kDefaultSampleRate;
    double bpfi_order = 5.415;
    double bpfo_order = 3.585;
    double bsf_order = 2.357;
    double resonance_hz = 3000.0;
    // Second, fault-location specific ringing mode (transmission path),
    // at path_gain times the main impulse amplitude. 0 Hz disables it.
    double if_path_hz = 4200.0;
    double bf_path_hz = 1800.0;
    double of_path_hz = 5000.0;
    double path_gain = 1.0;
    double path_decay_per_s = 1500.0; // 0 uses decay_per_s
    double decay_per_s = 800.0;
    double impulse_amplitude = 1.0;
    double noise_sigma = 0.06;
    double jitter = 0.04;
    double shaft_amplitude = 0.3;
    int shaft_harmonics = 3;
    double modulation_depth = 0.5;
    // Defect size the impulse amplitude is specified at; amplitude scales
    // linearly with the actual fault size.
    double reference_fault_size = 0.014;

    double order_for(FaultType type) const;
    double path_mode_for(FaultType type) const;
    void validate() const;
};

/// Characteristic impulse rate in Hz for a fault type at a given load.
double characteristic_frequency(const SynthParams& params, FaultType type, const LoadCondition& load);

/// Simulated accelerometer record. Deterministic for a fixed seed.
Signal synth_bearing_signal(const SynthParams& params, const FaultClass& label,
                            const LoadCondition& load, double duration_s, std::uint64_t seed);

enum class RawFormat { Float32LE, Float64LE, Csv };

RawFormat parse_raw_format(std::string_view text);
std::string_view to_string(RawFormat format);

/// Decodes a raw recording. Errors name the byte offset (binary formats) or
/// line number (CSV) of the first bad value.
Signal ingest_raw(const std::filesystem::path& path, RawFormat format, double sample_rate,
                  const FaultClass& label, const LoadCondition& load);

/// Writes samples in one of the raw formats; the inverse of ingest_raw.
void write_raw(const std::filesystem::path& path, RawFormat format, std::span<const double> samples);

} // namespace specfault
