#pragma once

#include "specfault/classifier.hpp"
#include "specfault/corpus.hpp"
#include "specfault/vibration.hpp"

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace specfault {

enum class DataSource { Synthetic, Ingested };

inline constexpr std::size_t kDeskImagesPerClass = 40;
inline constexpr std::size_t kFullImagesPerClass = 400;

/// One test of the experiment grid plus everything needed to build its corpus.
struct ExperimentConfig {
    DataSource source = DataSource::Synthetic;
    SynthParams synth;
    std::filesystem::path manifest;
    double fault_size = 0.014;
    int training_load = 0;
    std::vector<int> testing_loads{0, 1, 2, 3};
    std::vector<FaultType> classes{FaultType::IF, FaultType::BF, FaultType::OF, FaultType::NO};
    std::size_t n_per_class = 5;
    std::size_t repetitions = 20;
    FeatureKind feature_kind = FeatureKind::EigenImage;
    Eigen::Index d = 10;
    double pca_contribution = 0.90;
    std::size_t images_per_class_per_load = kDeskImagesPerClass;
    std::size_t image_rows = kImageRows;
    std::size_t image_cols = kImageCols;
    std::uint64_t master_seed = 20160711;
    bool record_timing = true;

    void validate() const;
    /// Test numbering: 1..4 train on Load0..3 at 0.014in, 5..8 at 0.021in.
    int test_id() const;
};

/// Sets fault_size and training_load from a test id (1..8).
void apply_test_id(ExperimentConfig& config, int test_id);

/// Cartesian grid of tests x feature kinds x n values over a shared base config.
struct SuiteConfig {
    ExperimentConfig base;
    std::vector<int> tests;
    std::vector<FeatureKind> kinds{FeatureKind::EigenImage};
    std::vector<std::size_t> n_values{5};
};

/// Parses the flat "key = value" experiment file. Unknown or repeated keys
/// are errors. List-valued keys (tests, n_per_class, feature_kind,
/// testing_loads, classes) take comma-separated values.
using ConfigPairs = std::vector<std::pair<std::string, std::string>>;

// Line syntax, unknown and duplicate keys are checked here; values are not.
ConfigPairs read_config_pairs(std::istream& in);
SuiteConfig resolve_suite_config(const ConfigPairs& pairs);
SuiteConfig parse_suite_config(std::istream& in);
SuiteConfig load_suite_config(const std::filesystem::path& path);
/// Applies one key = value pair; exposed for programmatic overrides.
void set_config_value(SuiteConfig& config, const std::string& key, const std::string& value);

using ConfusionMatrix = std::array<std::array<std::uint64_t, kFaultTypeCount>, kFaultTypeCount>;

struct ReportEntry {
    int test_id = 0;
    FeatureKind kind = FeatureKind::EigenImage;
    std::size_t n = 0;
    int testing_load = 0;
    double mean_rate_pct = 0.0;
    double stddev_pct = 0.0;
    /// Extraction + classification wall-clock over all repetitions of this
    /// (test, kind, n); shared by its testing-load rows. NaN when not recorded.
    double seconds = 0.0;
    std::vector<double> repetition_rates;
    ConfusionMatrix confusion{}; // [true][predicted], summed over repetitions
    std::uint64_t tested_per_repetition = 0;
};

struct Report {
    std::vector<ReportEntry> entries;
};

/// Exactly images_per_class_per_load images for every configured class and
/// every load in {training_load} + testing_loads. Deterministic in the
/// master seed (synthetic) or manifest order (ingested).
Corpus build_corpus(const ExperimentConfig& config);

/// One test at one (kind, n): per-repetition split, fit, classify.
/// Appends one entry per testing load.
std::vector<ReportEntry> run_test(const Corpus& corpus, const ExperimentConfig& config);

Report run_suite(const SuiteConfig& suite);

enum class ReportFormat { Csv, Text };

ReportFormat parse_report_format(std::string_view text);
void emit_report(std::ostream& out, const Report& report, ReportFormat format);
void emit_report(const std::filesystem::path& path, const Report& report, ReportFormat format);
/// Reads a CSV produced by emit_report. Per-repetition data and confusion
/// matrices are not part of the CSV and come back empty.
Report parse_report_csv(std::istream& in);
Report load_report_csv(const std::filesystem::path& path);

} // namespace specfault
