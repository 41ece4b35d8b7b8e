#include "specfault/error.hpp"
#include "specfault/spectrum.hpp"
#include "specfault/vibration.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <numeric>

using namespace specfault;

namespace {

Signal ramp(std::size_t n)
{
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), 0.0);
    return Signal(std::move(v), 12000.0, FaultClass::normal(), LoadCondition(0));
}

void write_text(const std::filesystem::path& p, const std::string& s)
{
    std::ofstream(p, std::ios::binary) << s;
}

SynthParams quiet_params()
{
    SynthParams p;
    p.noise_sigma = 0.0;
    p.shaft_amplitude = 0.0;
    return p;
}

} // namespace

TEST_CASE("load conditions map to the four motor speeds")
{
    CHECK(LoadCondition(0).shaft_rpm() == 1797.0);
    CHECK(LoadCondition(1).shaft_rpm() == 1772.0);
    CHECK(LoadCondition(2).shaft_rpm() == 1750.0);
    CHECK(LoadCondition(3).shaft_rpm() == 1730.0);
    CHECK_THROWS_AS(LoadCondition(4), InvalidArgument);
    CHECK_THROWS_AS(LoadCondition(-1), InvalidArgument);
}

TEST_CASE("fault classes")
{
    CHECK_FALSE(FaultClass::normal().size().has_value());
    CHECK_THROWS_AS(FaultClass(FaultType::NO, 0.014), InvalidArgument);
    CHECK_THROWS_AS(FaultClass(FaultType::OF, std::nullopt), InvalidArgument);
    CHECK(FaultClass(FaultType::IF, 0.021).size() == 0.021);
    for (auto t : {FaultType::NO, FaultType::IF, FaultType::BF, FaultType::OF})
        CHECK(parse_fault_type(to_string(t)) == t);
    CHECK_THROWS_AS(parse_fault_type("XX"), InvalidArgument);
}

TEST_CASE("signal invariants")
{
    CHECK_THROWS_AS(Signal({}, 12000.0, FaultClass::normal(), LoadCondition(0)), DataError);
    CHECK_THROWS_AS(Signal({1.0}, 0.0, FaultClass::normal(), LoadCondition(0)), InvalidArgument);
    CHECK_THROWS_AS(Signal({1.0, NAN}, 12000.0, FaultClass::normal(), LoadCondition(0)), DataError);
}

TEST_CASE("segment counts")
{
    CHECK(segment(ramp(4096), 1024, 1024).size() == 4);
    CHECK(segment(ramp(1024), 1024, 1024).size() == 1);

    const auto w = segment(ramp(5000), 1024, 512);
    std::size_t expected = 0;
    for (std::size_t start = 0; start + 1024 <= 5000; start += 512)
        ++expected;
    CHECK(expected == 8);
    REQUIRE(w.size() == expected);
    for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(w[i].size() == 1024);
        CHECK(w[i].samples()[0] == static_cast<double>(512 * i));
    }

    CHECK_THROWS_AS(segment(ramp(1000), 1024, 1024), DataError);
    CHECK_THROWS_AS(segment(ramp(4096), 1024, 0), InvalidArgument);
}

TEST_CASE("segment with hop equal to the window tiles a prefix")
{
    const Signal s = ramp(5000);
    std::vector<double> joined;
    for (const auto& w : segment(s, 1000, 1000))
        joined.insert(joined.end(), w.samples().begin(), w.samples().end());
    REQUIRE(joined.size() == 5000);
    for (std::size_t i = 0; i < joined.size(); ++i)
        CHECK(joined[i] == s.samples()[i]);

    const auto w = segment(s, 1024, 1024);
    CHECK(w.size() * 1024 == 4096);
    CHECK(w.back().label() == s.label());
    CHECK(w.back().load() == s.load());
}

TEST_CASE("synthesis is deterministic per seed")
{
    const SynthParams p;
    const FaultClass of(FaultType::OF, 0.014);
    const auto a = synth_bearing_signal(p, of, LoadCondition(1), 0.5, 7);
    const auto b = synth_bearing_signal(p, of, LoadCondition(1), 0.5, 7);
    const auto c = synth_bearing_signal(p, of, LoadCondition(1), 0.5, 8);
    REQUIRE(a.size() == b.size());
    CHECK(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin()));
    CHECK_FALSE(std::equal(a.samples().begin(), a.samples().end(), c.samples().begin()));
    CHECK(a.size() == 6000);
}

TEST_CASE("synthesis rejects bad durations and parameters")
{
    const SynthParams p;
    CHECK_THROWS_AS(synth_bearing_signal(p, FaultClass::normal(), LoadCondition(0), 0.0, 1), InvalidArgument);
    CHECK_THROWS_AS(synth_bearing_signal(p, FaultClass::normal(), LoadCondition(0), -1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(synth_bearing_signal(p, FaultClass::normal(), LoadCondition(0), 0.05, 1), InvalidArgument);
    SynthParams bad = p;
    bad.jitter = 0.06;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = p;
    bad.noise_sigma = -0.1;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("noiseless normal signal has energy only at shaft orders")
{
    SynthParams p;
    p.noise_sigma = 0.0;
    const LoadCondition load(0);
    const std::size_t n = 1u << 17;
    const auto s = synth_bearing_signal(p, FaultClass::normal(), load, static_cast<double>(n) / p.sample_rate, 3);
    REQUIRE(s.size() == n);

    std::vector<std::complex<double>> x(s.samples().begin(), s.samples().end());
    fft_inplace(x);
    const double bin = p.sample_rate / static_cast<double>(n);
    double peak = 0.0;
    for (std::size_t k = 0; k < n / 2; ++k)
        peak = std::max(peak, std::abs(x[k]));
    for (std::size_t k = 1; k + 1 < n / 2; ++k) {
        const double m = std::abs(x[k]);
        if (m < 0.01 * peak || m < std::abs(x[k - 1]) || m < std::abs(x[k + 1]))
            continue;
        double nearest = 1e300;
        for (int order = 1; order <= p.shaft_harmonics; ++order)
            nearest = std::min(nearest, std::abs(static_cast<double>(k) * bin - order * load.shaft_hz()));
        CHECK(nearest < 3.0);
    }
}

TEST_CASE("outer-race impulses are spaced at the characteristic period")
{
    const SynthParams p = quiet_params();
    const LoadCondition load(0);
    const double rate = 3.585 * 1797.0 / 60.0;
    CHECK(characteristic_frequency(p, FaultType::OF, load) == doctest::Approx(rate));

    const auto s = synth_bearing_signal(p, FaultClass(FaultType::OF, 0.014), load, 10.0, 11);
    const auto x = s.samples();
    double amax = 0.0;
    for (double v : x)
        amax = std::max(amax, std::abs(v));
    const double threshold = 0.3 * amax;
    const auto guard = static_cast<std::size_t>(0.5 * p.sample_rate / rate);

    // An onset is the first sample over threshold after a quiet half period.
    std::vector<std::size_t> onsets;
    std::size_t last_loud = 0;
    bool any = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) < threshold)
            continue;
        if (!any || i - last_loud > guard)
            onsets.push_back(i);
        last_loud = i;
        any = true;
    }
    REQUIRE(onsets.size() > 100);
    const double mean_spacing =
        static_cast<double>(onsets.back() - onsets.front()) / static_cast<double>(onsets.size() - 1) / p.sample_rate;
    CHECK(std::abs(mean_spacing - 1.0 / rate) < 0.01 / rate);
}

namespace {

// Strongest line of the squared-signal spectrum between 0.6 fc and 600 Hz.
double envelope_peak_hz(const Signal& s, double fc)
{
    const std::size_t n = s.size();
    double mean = 0.0;
    for (double v : s.samples())
        mean += v * v;
    mean /= static_cast<double>(n);
    std::vector<std::complex<double>> e(n);
    for (std::size_t i = 0; i < n; ++i)
        e[i] = s.samples()[i] * s.samples()[i] - mean;
    fft_inplace(e);
    const double bin = s.sample_rate() / static_cast<double>(n);
    std::size_t best = 0;
    for (auto k = static_cast<std::size_t>(0.6 * fc / bin); k < static_cast<std::size_t>(600.0 / bin); ++k)
        if (std::abs(e[k]) > std::abs(e[best]))
            best = k;
    return static_cast<double>(best) * bin;
}

} // namespace

TEST_CASE("envelope spectrum peaks on a harmonic of the characteristic frequency")
{
    const std::size_t n = 1u << 17;
    for (double jitter : {0.0, SynthParams{}.jitter}) {
        SynthParams p;
        p.noise_sigma = 0.0;
        p.shaft_amplitude = 0.0;
        p.jitter = jitter;
        const double bin = p.sample_rate / static_cast<double>(n);
        for (auto type : {FaultType::IF, FaultType::BF, FaultType::OF}) {
            for (int l = 0; l < kLoadCount; ++l) {
                CAPTURE(jitter);
                CAPTURE(to_string(type));
                CAPTURE(l);
                const LoadCondition load(l);
                const auto s = synth_bearing_signal(p, FaultClass(type, 0.014), load,
                                                    static_cast<double>(n) / p.sample_rate, 100 + l);
                const double fc = characteristic_frequency(p, type, load);
                // Period jitter is a random walk, so the mean rate drifts slightly.
                // Sharp impulses put similar power in the first few harmonics.
                const double peak = envelope_peak_hz(s, fc);
                const double k = std::max(1.0, std::round(peak / fc));
                const double tol = jitter == 0.0 ? bin : std::max(bin, 0.005 * k * fc);
                CHECK(std::abs(peak - k * fc) <= tol);
            }
        }
    }
}

TEST_CASE("csv ingestion")
{
    const auto dir = testing::scratch_dir("ingest_csv");
    write_text(dir / "a.csv", "1.0\n-2.5\n0.0");
    const auto s = ingest_raw(dir / "a.csv", RawFormat::Csv, 12000.0, FaultClass::normal(), LoadCondition(0));
    REQUIRE(s.size() == 3);
    CHECK(s.samples()[0] == 1.0);
    CHECK(s.samples()[1] == -2.5);
    CHECK(s.samples()[2] == 0.0);

    write_text(dir / "crlf.csv", "1\r\n2\r\n");
    CHECK(ingest_raw(dir / "crlf.csv", RawFormat::Csv, 1.0, FaultClass::normal(), LoadCondition(0)).size() == 2);

    write_text(dir / "bad.csv", "1.0\nabc\n");
    try {
        ingest_raw(dir / "bad.csv", RawFormat::Csv, 12000.0, FaultClass::normal(), LoadCondition(0));
        FAIL("expected an error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    write_text(dir / "nan.csv", "1.0\nnan\n");
    CHECK_THROWS_AS(ingest_raw(dir / "nan.csv", RawFormat::Csv, 1.0, FaultClass::normal(), LoadCondition(0)),
                    DataError);
    write_text(dir / "empty.csv", "");
    CHECK_THROWS_AS(ingest_raw(dir / "empty.csv", RawFormat::Csv, 1.0, FaultClass::normal(), LoadCondition(0)),
                    DataError);
    CHECK_THROWS_AS(ingest_raw(dir / "missing.csv", RawFormat::Csv, 1.0, FaultClass::normal(), LoadCondition(0)),
                    IoError);
}

TEST_CASE("binary ingestion")
{
    const auto dir = testing::scratch_dir("ingest_bin");
    std::vector<double> v(1024);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::sin(0.01 * static_cast<double>(i));
    write_raw(dir / "a.f64", RawFormat::Float64LE, v);
    CHECK(std::filesystem::file_size(dir / "a.f64") == 8192);
    const auto s = ingest_raw(dir / "a.f64", RawFormat::Float64LE, 12000.0, FaultClass::normal(), LoadCondition(0));
    REQUIRE(s.size() == 1024);
    CHECK(std::equal(v.begin(), v.end(), s.samples().begin()));

    write_text(dir / "odd.f64", std::string(12, '\0'));
    try {
        ingest_raw(dir / "odd.f64", RawFormat::Float64LE, 1.0, FaultClass::normal(), LoadCondition(0));
        FAIL("expected an error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("byte offset 8") != std::string::npos);
    }

    const std::vector<double> bad{1.0, INFINITY};
    {
        std::ofstream out(dir / "inf.f64", std::ios::binary);
        out.write(reinterpret_cast<const char*>(bad.data()), 16);
    }
    try {
        ingest_raw(dir / "inf.f64", RawFormat::Float64LE, 1.0, FaultClass::normal(), LoadCondition(0));
        FAIL("expected an error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("byte offset 8") != std::string::npos);
    }
}

TEST_CASE("synthetic signals round-trip through every raw format")
{
    const auto dir = testing::scratch_dir("ingest_rt");
    const SynthParams p;
    const FaultClass label(FaultType::IF, 0.021);
    const auto s = synth_bearing_signal(p, label, LoadCondition(2), 0.2, 5);
    for (auto f : {RawFormat::Float64LE, RawFormat::Csv}) {
        write_raw(dir / "sig", f, s.samples());
        const auto back = ingest_raw(dir / "sig", f, s.sample_rate(), label, LoadCondition(2));
        REQUIRE(back.size() == s.size());
        CHECK(std::equal(s.samples().begin(), s.samples().end(), back.samples().begin()));
        CHECK(back.label() == label);
    }
    write_raw(dir / "sig32", RawFormat::Float32LE, s.samples());
    const auto back = ingest_raw(dir / "sig32", RawFormat::Float32LE, s.sample_rate(), label, LoadCondition(2));
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(back.samples()[i] == static_cast<double>(static_cast<float>(s.samples()[i])));
}
