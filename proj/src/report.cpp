#include "specfault/experiment.hpp"

#include "specfault/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace specfault {

namespace {

constexpr std::string_view kCsvHeader = "test_id,feature_kind,n,testing_load,mean_rate_pct,stddev_pct,seconds";

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string seconds_text(double s) { return std::isnan(s) ? "NA" : fixed(s, 3); }

std::string kind_title(FeatureKind kind)
{
    switch (kind) {
    case FeatureKind::EigenImage: return "2DPCA";
    case FeatureKind::PcaVector: return "PCA";
    case FeatureKind::FftAmplitude: return "FFT amplitude";
    }
    return "?";
}

void emit_csv(std::ostream& out, const Report& report)
{
    out << kCsvHeader << '\n';
    for (const auto& e : report.entries) {
        out << e.test_id << ',' << to_string(e.kind) << ',' << e.n << ',' << e.testing_load << ','
            << fixed(e.mean_rate_pct, 2) << ',' << fixed(e.stddev_pct, 2) << ',' << seconds_text(e.seconds) << '\n';
    }
}

// One table per (feature kind, fault size), rows grouped by test and n.
void emit_text(std::ostream& out, const Report& report)
{
    struct Row {
        std::vector<const ReportEntry*> cells;
    };
    using RowKey = std::pair<int, std::size_t>; // test id, n
    std::map<std::pair<int, int>, std::map<RowKey, Row>> tables; // (kind, size group)
    std::vector<std::pair<int, int>> table_order;
    for (const auto& e : report.entries) {
        const std::pair<int, int> tk{static_cast<int>(e.kind), e.test_id <= 4 ? 0 : 1};
        if (!tables.contains(tk))
            table_order.push_back(tk);
        tables[tk][{e.test_id, e.n}].cells.push_back(&e);
    }

    bool first = true;
    for (const auto& tk : table_order) {
        if (!first)
            out << '\n';
        first = false;
        const auto& rows = tables[tk];
        std::size_t width = 0;
        for (const auto& [key, row] : rows)
            width = std::max(width, row.cells.size());

        out << "Classification rate based on " << kind_title(static_cast<FeatureKind>(tk.first))
            << " with fault size " << (tk.second == 0 ? "0.014" : "0.021") << "in\n";
        out << std::left << std::setw(11) << "# of test" << std::setw(6) << "n";
        for (std::size_t c = 0; c < width; ++c)
            out << std::setw(16) << ("Test" + std::to_string(c + 1) + "(%)");
        out << "T(s)\n";

        int last_test = -1;
        for (const auto& [key, row] : rows) {
            if (last_test != -1 && key.first != last_test)
                out << '\n';
            out << std::setw(11) << (key.first != last_test ? std::to_string(key.first) : std::string())
                << std::setw(6) << key.second;
            last_test = key.first;
            for (const ReportEntry* e : row.cells)
                out << std::setw(16) << ("Load" + std::to_string(e->testing_load) + "(" + fixed(e->mean_rate_pct, 2) + ")");
            for (std::size_t c = row.cells.size(); c < width; ++c)
                out << std::setw(16) << "";
            out << seconds_text(row.cells.front()->seconds) << '\n';
        }
    }
}

template <typename T>
T parse_number(const std::string& field, std::size_t line_no)
{
    T v{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw DataError("report line " + std::to_string(line_no) + ": malformed value '" + field + "'");
    return v;
}

} // namespace

ReportFormat parse_report_format(std::string_view text)
{
    if (text == "csv")
        return ReportFormat::Csv;
    if (text == "text")
        return ReportFormat::Text;
    throw InvalidArgument("unknown report format '" + std::string(text) + "' (csv, text)");
}

void emit_report(std::ostream& out, const Report& report, ReportFormat format)
{
    if (format == ReportFormat::Csv)
        emit_csv(out, report);
    else
        emit_text(out, report);
}

void emit_report(const std::filesystem::path& path, const Report& report, ReportFormat format)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path.string() + "'");
    emit_report(out, report, format);
    out.flush();
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

Report parse_report_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw DataError("report CSV must start with the header '" + std::string(kCsvHeader) + "'");
    Report report;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
            f.push_back(field);
        if (f.size() != 7)
            throw DataError("report line " + std::to_string(line_no) + ": expected 7 fields");
        ReportEntry e;
        e.test_id = parse_number<int>(f[0], line_no);
        try {
            e.kind = parse_feature_kind(f[1]);
        } catch (const InvalidArgument& ex) {
            throw DataError("report line " + std::to_string(line_no) + ": " + ex.what());
        }
        e.n = parse_number<std::size_t>(f[2], line_no);
        e.testing_load = parse_number<int>(f[3], line_no);
        e.mean_rate_pct = parse_number<double>(f[4], line_no);
        e.stddev_pct = parse_number<double>(f[5], line_no);
        e.seconds = f[6] == "NA" ? std::nan("") : parse_number<double>(f[6], line_no);
        if (e.test_id < 1 || e.test_id > 8 || e.testing_load < 0 || e.testing_load >= kLoadCount)
            throw DataError("report line " + std::to_string(line_no) + ": test id or load out of range");
        report.entries.push_back(std::move(e));
    }
    return report;
}

Report load_report_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    return parse_report_csv(in);
}

} // namespace specfault
