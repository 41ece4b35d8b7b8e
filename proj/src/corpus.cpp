#include "specfault/corpus.hpp"

#include "specfault/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace specfault {

namespace {

constexpr std::string_view kRecordingsHeader = "# specfault recordings v1";
constexpr std::string_view kCorpusHeader = "# specfault corpus v1";

std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos)
            break;
        start = tab + 1;
    }
    return fields;
}

double parse_double(const std::string& text, const std::string& where)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
        throw DataError(where + ": malformed number '" + text + "'");
    return v;
}

int parse_int(const std::string& text, const std::string& where)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw DataError(where + ": malformed integer '" + text + "'");
    return v;
}

// Reads the data lines of a manifest, checking the header line.
std::vector<std::pair<std::size_t, std::vector<std::string>>>
read_manifest_lines(const std::filesystem::path& path, std::string_view header, std::size_t fields)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || line.substr(0, header.size()) != header)
        throw DataError(path.string() + ": missing header '" + std::string(header) + "'");
    ++line_no;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        auto f = split_tabs(line);
        if (f.size() != fields) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(f.size()) + " fields, expected " + std::to_string(fields));
        }
        rows.emplace_back(line_no, std::move(f));
    }
    return rows;
}

std::filesystem::path resolve(const std::filesystem::path& manifest, const std::string& entry)
{
    std::filesystem::path p(entry);
    return p.is_absolute() ? p : manifest.parent_path() / p;
}

FaultClass make_label(const std::string& type_text, const std::string& size_text, const std::string& where)
{
    try {
        return FaultClass(parse_fault_type(type_text), parse_fault_size(size_text));
    } catch (const InvalidArgument& e) {
        throw DataError(where + ": " + e.what());
    }
}

LoadCondition make_load(const std::string& text, const std::string& where)
{
    try {
        return LoadCondition(parse_int(text, where));
    } catch (const InvalidArgument& e) {
        throw DataError(where + ": " + e.what());
    }
}

} // namespace

void Corpus::add(CorpusSample sample)
{
    const auto type = static_cast<std::size_t>(sample.label.type());
    const auto load = static_cast<std::size_t>(sample.load.index());
    groups_[type][load].push_back(samples_.size());
    samples_.push_back(std::move(sample));
}

std::span<const std::size_t> Corpus::group(FaultType type, int load) const
{
    if (load < 0 || load >= kLoadCount)
        throw InvalidArgument("load index must be 0..3");
    return groups_[static_cast<std::size_t>(type)][static_cast<std::size_t>(load)];
}

std::string format_fault_size(const std::optional<double>& size)
{
    if (!size)
        return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", *size);
    return buf;
}

std::optional<double> parse_fault_size(std::string_view text)
{
    if (text == "-" || text.empty())
        return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw InvalidArgument("malformed fault size '" + std::string(text) + "'");
    return v;
}

std::vector<CorpusSample> render_windows(const Signal& signal, std::size_t count, std::size_t rows,
                                         std::size_t cols, std::size_t hop)
{
    const auto windows = segment(signal, kFftSize, hop);
    if (windows.size() < count) {
        throw DataError("signal yields " + std::to_string(windows.size()) + " windows, " +
                        std::to_string(count) + " required");
    }
    std::vector<CorpusSample> out;
    out.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        Spectrum spectrum = fft_magnitude(windows[w].samples(), signal.sample_rate());
        PackedImage image = rasterize_packed(spectrum, rows, cols);
        out.push_back({signal.label(), signal.load(), std::move(image), std::move(spectrum)});
    }
    return out;
}

std::vector<RecordingEntry> read_recordings_manifest(const std::filesystem::path& path)
{
    std::vector<RecordingEntry> entries;
    for (const auto& [line_no, f] : read_manifest_lines(path, kRecordingsHeader, 6)) {
        const std::string where = path.string() + ":" + std::to_string(line_no);
        RecordingEntry e;
        e.path = resolve(path, f[0]);
        try {
            e.format = parse_raw_format(f[1]);
        } catch (const InvalidArgument& ex) {
            throw DataError(where + ": " + ex.what());
        }
        e.sample_rate = parse_double(f[2], where);
        if (!(e.sample_rate > 0.0))
            throw DataError(where + ": sample rate must be positive");
        e.label = make_label(f[3], f[4], where);
        e.load = make_load(f[5], where);
        entries.push_back(std::move(e));
    }
    return entries;
}

void write_recordings_manifest(const std::filesystem::path& path, std::span<const RecordingEntry> entries)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path.string() + "'");
    out << kRecordingsHeader << '\n';
    out << "# path\tformat\tsample_rate\tclass\tfault_size\tload\n";
    for (const auto& e : entries) {
        char rate[32];
        std::snprintf(rate, sizeof(rate), "%.17g", e.sample_rate);
        out << e.path.string() << '\t' << to_string(e.format) << '\t' << rate << '\t' << to_string(e.label.type())
            << '\t' << format_fault_size(e.label.size()) << '\t' << e.load.index() << '\n';
    }
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

void write_corpus(const std::filesystem::path& dir, const std::filesystem::path& manifest, const Corpus& corpus)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
    std::ofstream out(manifest, std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + manifest.string() + "'");
    out << kCorpusHeader << '\n';
    out << "# image\tspectrum\tclass\tfault_size\tload\tbin_width\n";

    const auto base = manifest.parent_path().empty() ? std::filesystem::path(".") : manifest.parent_path();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& s = corpus[i];
        char stem[96];
        std::snprintf(stem, sizeof(stem), "%s_%s_L%d_%05zu", std::string(to_string(s.label.type())).c_str(),
                      s.label.size() ? format_fault_size(s.label.size()).c_str() : "na", s.load.index(), i);
        const auto image_path = dir / (std::string(stem) + ".pgm");
        const auto spectrum_path = dir / (std::string(stem) + ".f64");
        write_pgm(image_path, s.image);
        write_spectrum(spectrum_path, s.spectrum);

        char width[32];
        std::snprintf(width, sizeof(width), "%.17g", s.spectrum.bin_width());
        out << std::filesystem::proximate(image_path, base).string() << '\t'
            << std::filesystem::proximate(spectrum_path, base).string() << '\t' << to_string(s.label.type()) << '\t'
            << format_fault_size(s.label.size()) << '\t' << s.load.index() << '\t' << width << '\n';
    }
    if (!out)
        throw IoError("write failed for '" + manifest.string() + "'");
}

Corpus read_corpus(const std::filesystem::path& manifest)
{
    Corpus corpus;
    for (const auto& [line_no, f] : read_manifest_lines(manifest, kCorpusHeader, 6)) {
        const std::string where = manifest.string() + ":" + std::to_string(line_no);
        FaultClass label = make_label(f[2], f[3], where);
        LoadCondition load = make_load(f[4], where);
        const double bin_width = parse_double(f[5], where);
        PackedImage image = read_pgm(resolve(manifest, f[0]));
        Spectrum spectrum = read_spectrum(resolve(manifest, f[1]), bin_width);
        corpus.add({label, load, std::move(image), std::move(spectrum)});
    }
    return corpus;
}

} // namespace specfault
