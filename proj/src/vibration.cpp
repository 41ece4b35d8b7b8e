#include "specfault/vibration.hpp"

#include "specfault/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

namespace specfault {

namespace {

constexpr std::array<double, kLoadCount> kShaftRpm = {1797.0, 1772.0, 1750.0, 1730.0};

std::vector<char> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename T>
T load_le(const char* bytes)
{
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        auto* p = reinterpret_cast<unsigned char*>(&value);
        std::reverse(p, p + sizeof(T));
    }
    return value;
}

template <typename T>
void store_le(std::ostream& out, T value)
{
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    out.write(bytes, sizeof(T));
}

template <typename T>
std::vector<double> decode_binary(const std::vector<char>& bytes, const std::string& name)
{
    if (bytes.size() % sizeof(T) != 0) {
        throw DataError(name + ": " + std::to_string(bytes.size() % sizeof(T)) +
                        " trailing bytes at byte offset " +
                        std::to_string(bytes.size() - bytes.size() % sizeof(T)));
    }
    std::vector<double> out;
    out.reserve(bytes.size() / sizeof(T));
    for (std::size_t off = 0; off < bytes.size(); off += sizeof(T)) {
        const double v = load_le<T>(bytes.data() + off);
        if (!std::isfinite(v))
            throw DataError(name + ": non-finite value at byte offset " + std::to_string(off));
        out.push_back(v);
    }
    return out;
}

std::vector<double> decode_csv(const std::vector<char>& bytes, const std::string& name)
{
    std::vector<double> out;
    const std::string_view text(bytes.data(), bytes.size());
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t'))
            line.remove_prefix(1);
        if (line.empty()) {
            // A single trailing newline is fine; blank lines inside the data are not.
            if (pos >= text.size())
                break;
            throw DataError(name + ": empty value at line " + std::to_string(line_no));
        }
        if (line.front() == '+')
            line.remove_prefix(1);

        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc() || ptr != line.data() + line.size())
            throw DataError(name + ": malformed number at line " + std::to_string(line_no));
        if (!std::isfinite(v))
            throw DataError(name + ": non-finite value at line " + std::to_string(line_no));
        out.push_back(v);
    }
    return out;
}

} // namespace

std::string_view to_string(FaultType type)
{
    switch (type) {
    case FaultType::NO: return "NO";
    case FaultType::IF: return "IF";
    case FaultType::BF: return "BF";
    case FaultType::OF: return "OF";
    }
    return "?";
}

FaultType parse_fault_type(std::string_view text)
{
    if (text == "NO") return FaultType::NO;
    if (text == "IF") return FaultType::IF;
    if (text == "BF") return FaultType::BF;
    if (text == "OF") return FaultType::OF;
    throw InvalidArgument("unknown fault class '" + std::string(text) + "' (expected NO, IF, BF or OF)");
}

FaultClass::FaultClass(FaultType type, std::optional<double> size_in) : type_(type), size_(size_in)
{
    if (type == FaultType::NO && size_in)
        throw InvalidArgument("normal bearings carry no fault size");
    if (type != FaultType::NO) {
        if (!size_in)
            throw InvalidArgument("fault classes require a fault size");
        if (!(*size_in > 0.0) || !std::isfinite(*size_in))
            throw InvalidArgument("fault size must be positive");
    }
}

LoadCondition::LoadCondition(int index) : index_(index)
{
    if (index < 0 || index >= kLoadCount)
        throw InvalidArgument("load index must be 0..3, got " + std::to_string(index));
}

double LoadCondition::shaft_rpm() const { return kShaftRpm[static_cast<std::size_t>(index_)]; }

Signal::Signal(std::vector<double> samples, double sample_rate, FaultClass label, LoadCondition load)
    : samples_(std::move(samples)), sample_rate_(sample_rate), label_(label), load_(load)
{
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
        throw InvalidArgument("sample rate must be positive");
    if (samples_.empty())
        throw DataError("signal has no samples");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i]))
            throw DataError("non-finite sample at index " + std::to_string(i));
    }
}

std::vector<Signal> segment(const Signal& signal, std::size_t window_len, std::size_t hop)
{
    if (window_len == 0)
        throw InvalidArgument("window length must be positive");
    if (hop == 0)
        throw InvalidArgument("hop must be at least 1");
    if (signal.size() < window_len) {
        throw DataError("signal of " + std::to_string(signal.size()) +
                        " samples is shorter than the window of " + std::to_string(window_len));
    }
    const std::size_t count = (signal.size() - window_len) / hop + 1;
    std::vector<Signal> windows;
    windows.reserve(count);
    const auto samples = signal.samples();
    for (std::size_t w = 0; w < count; ++w) {
        const auto first = samples.begin() + static_cast<std::ptrdiff_t>(w * hop);
        windows.emplace_back(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(window_len)),
                             signal.sample_rate(), signal.label(), signal.load());
    }
    return windows;
}

double SynthParams::order_for(FaultType type) const
{
    switch (type) {
    case FaultType::IF: return bpfi_order;
    case FaultType::OF: return bpfo_order;
    case FaultType::BF: return bsf_order;
    case FaultType::NO: break;
    }
    return 0.0;
}

double SynthParams::path_mode_for(FaultType type) const
{
    switch (type) {
    case FaultType::IF: return if_path_hz;
    case FaultType::BF: return bf_path_hz;
    case FaultType::OF: return of_path_hz;
    case FaultType::NO: break;
    }
    return 0.0;
}

void SynthParams::validate() const
{
    auto non_negative = [](double v, const char* what) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidArgument(std::string("synth parameter ") + what + " must be non-negative");
    };
    if (!(sample_rate > 0.0))
        throw InvalidArgument("synth sample rate must be positive");
    non_negative(bpfi_order, "bpfi_order");
    non_negative(bpfo_order, "bpfo_order");
    non_negative(bsf_order, "bsf_order");
    non_negative(resonance_hz, "resonance_hz");
    non_negative(if_path_hz, "if_path_hz");
    non_negative(bf_path_hz, "bf_path_hz");
    non_negative(of_path_hz, "of_path_hz");
    non_negative(path_gain, "path_gain");
    non_negative(path_decay_per_s, "path_decay_per_s");
    non_negative(decay_per_s, "decay_per_s");
    non_negative(impulse_amplitude, "impulse_amplitude");
    non_negative(noise_sigma, "noise_sigma");
    non_negative(shaft_amplitude, "shaft_amplitude");
    non_negative(modulation_depth, "modulation_depth");
    if (!(reference_fault_size > 0.0))
        throw InvalidArgument("reference fault size must be positive");
    if (!(jitter >= 0.0 && jitter <= 0.05))
        throw InvalidArgument("jitter fraction must lie in [0, 0.05]");
    if (shaft_harmonics < 0)
        throw InvalidArgument("shaft harmonic count must be non-negative");
}

double characteristic_frequency(const SynthParams& params, FaultType type, const LoadCondition& load)
{
    return params.order_for(type) * load.shaft_hz();
}

Signal synth_bearing_signal(const SynthParams& params, const FaultClass& label,
                            const LoadCondition& load, double duration_s, std::uint64_t seed)
{
    params.validate();
    if (!(duration_s > 0.0) || !std::isfinite(duration_s))
        throw InvalidArgument("duration must be positive");
    const double fs = params.sample_rate;
    const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
    if (n < kDefaultWindow) {
        throw InvalidArgument("duration x sample rate gives " + std::to_string(n) +
                              " samples; at least 1024 are required");
    }

    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x(n, 0.0);

    const double shaft_hz = load.shaft_hz();
    for (int m = 1; m <= params.shaft_harmonics; ++m) {
        const double amp = params.shaft_amplitude / m;
        const double phase = two_pi * unit(rng);
        const double w = two_pi * m * shaft_hz / fs;
        for (std::size_t i = 0; i < n; ++i)
            x[i] += amp * std::sin(w * static_cast<double>(i) + phase);
    }

    if (label.type() != FaultType::NO) {
        const double rate = characteristic_frequency(params, label.type(), load);
        const double period = 1.0 / rate;
        const double amp = params.impulse_amplitude * (*label.size() / params.reference_fault_size);
        const double path_hz = params.path_mode_for(label.type());
        const double path_gain = path_hz > 0.0 ? params.path_gain : 0.0;
        const double path_decay = params.path_decay_per_s > 0.0 ? params.path_decay_per_s : params.decay_per_s;
        // Ring-down is cut where the slower envelope falls below 1e-7 of its peak.
        const double slowest = path_gain > 0.0 ? std::min(params.decay_per_s, path_decay) : params.decay_per_s;
        const double ring_s = slowest > 0.0 ? 16.1 / slowest : duration_s;
        const auto ring_len = static_cast<std::size_t>(std::ceil(ring_s * fs));
        const double mod_phase = two_pi * unit(rng);

        double t = period * unit(rng);
        const double end_t = static_cast<double>(n) / fs;
        while (t < end_t) {
            double a = amp;
            if (label.type() == FaultType::IF)
                a *= 1.0 + params.modulation_depth * std::cos(two_pi * shaft_hz * t + mod_phase);
            const auto first = static_cast<std::size_t>(std::ceil(t * fs));
            const std::size_t last = std::min(n, first + ring_len);
            for (std::size_t i = first; i < last; ++i) {
                const double dt = static_cast<double>(i) / fs - t;
                x[i] += a * (std::exp(-params.decay_per_s * dt) * std::sin(two_pi * params.resonance_hz * dt) +
                             path_gain * std::exp(-path_decay * dt) * std::sin(two_pi * path_hz * dt));
            }
            t += period * (1.0 + params.jitter * (2.0 * unit(rng) - 1.0));
        }
    }

    if (params.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, params.noise_sigma);
        for (double& v : x)
            v += noise(rng);
    }
    return Signal(std::move(x), fs, label, load);
}

RawFormat parse_raw_format(std::string_view text)
{
    if (text == "float32-le" || text == "f32") return RawFormat::Float32LE;
    if (text == "float64-le" || text == "f64") return RawFormat::Float64LE;
    if (text == "csv") return RawFormat::Csv;
    throw InvalidArgument("unknown raw format '" + std::string(text) + "' (float32-le, float64-le, csv)");
}

std::string_view to_string(RawFormat format)
{
    switch (format) {
    case RawFormat::Float32LE: return "float32-le";
    case RawFormat::Float64LE: return "float64-le";
    case RawFormat::Csv: return "csv";
    }
    return "?";
}

Signal ingest_raw(const std::filesystem::path& path, RawFormat format, double sample_rate,
                  const FaultClass& label, const LoadCondition& load)
{
    const auto bytes = read_file(path);
    const std::string name = path.string();
    if (bytes.empty())
        throw DataError(name + ": empty file");

    std::vector<double> samples;
    switch (format) {
    case RawFormat::Float32LE: samples = decode_binary<float>(bytes, name); break;
    case RawFormat::Float64LE: samples = decode_binary<double>(bytes, name); break;
    case RawFormat::Csv: samples = decode_csv(bytes, name); break;
    }
    if (samples.empty())
        throw DataError(name + ": no samples");
    return Signal(std::move(samples), sample_rate, label, load);
}

void write_raw(const std::filesystem::path& path, RawFormat format, std::span<const double> samples)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path.string() + "'");
    switch (format) {
    case RawFormat::Float32LE:
        for (double v : samples)
            store_le(out, static_cast<float>(v));
        break;
    case RawFormat::Float64LE:
        for (double v : samples)
            store_le(out, v);
        break;
    case RawFormat::Csv: {
        char buf[64];
        for (double v : samples) {
            const auto res = std::to_chars(buf, buf + sizeof(buf), v);
            out.write(buf, res.ptr - buf);
            out.put('\n');
        }
        break;
    }
    }
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

} // namespace specfault
