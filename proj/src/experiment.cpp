#include "specfault/experiment.hpp"

#include "specfault/error.hpp"
#include "specfault/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <set>
#include <thread>

namespace specfault {

namespace {

constexpr std::uint64_t kCorpusStream = 0xC0;
constexpr std::uint64_t kSplitStream = 0x5E;

bool is_table_size(double size)
{
    return std::abs(size - 0.014) < 1e-9 || std::abs(size - 0.021) < 1e-9;
}

std::uint64_t size_code(const FaultClass& label)
{
    return label.size() ? static_cast<std::uint64_t>(std::llround(*label.size() * 1e6)) : 0;
}

FaultClass label_for(FaultType type, double fault_size)
{
    return type == FaultType::NO ? FaultClass::normal() : FaultClass(type, fault_size);
}

std::vector<int> loads_needed(const ExperimentConfig& config)
{
    std::set<int> loads(config.testing_loads.begin(), config.testing_loads.end());
    loads.insert(config.training_load);
    return {loads.begin(), loads.end()};
}

std::vector<CorpusSample> synth_group(const ExperimentConfig& config, FaultType type, int load)
{
    const FaultClass label = label_for(type, config.fault_size);
    const LoadCondition condition(load);
    const std::size_t count = config.images_per_class_per_load;
    const double duration = static_cast<double>(count * kFftSize) / config.synth.sample_rate;
    const std::uint64_t seed = derive_seed(
        config.master_seed,
        {kCorpusStream, static_cast<std::uint64_t>(type), size_code(label), static_cast<std::uint64_t>(load)});
    const Signal signal = synth_bearing_signal(config.synth, label, condition, duration, seed);
    return render_windows(signal, count, config.image_rows, config.image_cols);
}

std::vector<CorpusSample> ingested_group(const ExperimentConfig& config, const std::vector<RecordingEntry>& recordings,
                                         FaultType type, int load)
{
    const std::size_t count = config.images_per_class_per_load;
    std::vector<CorpusSample> out;
    std::size_t available = 0;
    for (const auto& rec : recordings) {
        if (rec.label.type() != type || rec.load.index() != load)
            continue;
        if (type != FaultType::NO && std::abs(*rec.label.size() - config.fault_size) > 1e-9)
            continue;
        const Signal signal = ingest_raw(rec.path, rec.format, rec.sample_rate, rec.label, rec.load);
        const std::size_t windows = signal.size() >= kFftSize ? signal.size() / kFftSize : 0;
        available += windows;
        const std::size_t take = std::min(windows, count - out.size());
        if (take == 0)
            continue;
        auto rendered = render_windows(signal, take, config.image_rows, config.image_cols);
        std::move(rendered.begin(), rendered.end(), std::back_inserter(out));
        if (out.size() == count)
            break;
    }
    if (out.size() < count) {
        const std::size_t missing = count - out.size();
        throw DataError("class " + std::string(to_string(type)) + " at load " + std::to_string(load) + ": need " +
                        std::to_string(count) + " windows of 1024 samples but recordings provide " +
                        std::to_string(available) + " (short by " + std::to_string(missing) + " windows, " +
                        std::to_string(missing * kFftSize) + " samples)");
    }
    return out;
}

double sample_stddev(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

void ExperimentConfig::validate() const
{
    if (!is_table_size(fault_size))
        throw InvalidArgument("fault_size must be 0.014 or 0.021");
    (void)LoadCondition(training_load);
    if (testing_loads.empty())
        throw InvalidArgument("at least one testing load is required");
    for (int l : testing_loads)
        (void)LoadCondition(l);
    if (classes.empty())
        throw InvalidArgument("at least one class is required");
    if (std::set<FaultType>(classes.begin(), classes.end()).size() != classes.size())
        throw InvalidArgument("classes must not repeat");
    if (repetitions < 1)
        throw InvalidArgument("repetitions must be at least 1");
    if (n_per_class < 1)
        throw InvalidArgument("n_per_class must be at least 1");
    if (images_per_class_per_load < 1)
        throw InvalidArgument("images_per_class_per_load must be at least 1");
    if (n_per_class > images_per_class_per_load) {
        throw InvalidArgument("n_per_class (" + std::to_string(n_per_class) + ") exceeds images per class per load (" +
                              std::to_string(images_per_class_per_load) + ")");
    }
    if (image_rows < 2 || image_cols < 2)
        throw InvalidArgument("image must be at least 2 x 2");
    if (d < 1 || d >= static_cast<Eigen::Index>(image_cols))
        throw InvalidArgument("d must satisfy 1 <= d < image_cols");
    if (!(pca_contribution > 0.0 && pca_contribution <= 1.0))
        throw InvalidArgument("pca_contribution must lie in (0, 1]");
    if (source == DataSource::Ingested && manifest.empty())
        throw InvalidArgument("ingested source needs a manifest path");
    synth.validate();
}

int ExperimentConfig::test_id() const
{
    return (std::abs(fault_size - 0.021) < 1e-9 ? 4 : 0) + training_load + 1;
}

void apply_test_id(ExperimentConfig& config, int test_id)
{
    if (test_id < 1 || test_id > 8)
        throw InvalidArgument("test id must be 1..8, got " + std::to_string(test_id));
    config.fault_size = test_id <= 4 ? 0.014 : 0.021;
    config.training_load = (test_id - 1) % 4;
}

Corpus build_corpus(const ExperimentConfig& config)
{
    config.validate();
    const auto loads = loads_needed(config);

    std::vector<std::pair<FaultType, int>> groups;
    for (FaultType type : config.classes)
        for (int load : loads)
            groups.emplace_back(type, load);

    std::vector<std::vector<CorpusSample>> rendered(groups.size());
    if (config.source == DataSource::Synthetic) {
        // Each group has its own derived seed, so rendering order does not matter.
        const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                                 static_cast<unsigned>(groups.size())));
        if (workers == 1) {
            for (std::size_t g = 0; g < groups.size(); ++g)
                rendered[g] = synth_group(config, groups[g].first, groups[g].second);
        } else {
            std::vector<std::future<void>> jobs;
            std::atomic<std::size_t> next{0};
            for (unsigned w = 0; w < workers; ++w) {
                jobs.push_back(std::async(std::launch::async, [&] {
                    for (std::size_t g = next++; g < groups.size(); g = next++)
                        rendered[g] = synth_group(config, groups[g].first, groups[g].second);
                }));
            }
            for (auto& j : jobs)
                j.get();
        }
    } else {
        const auto recordings = read_recordings_manifest(config.manifest);
        for (std::size_t g = 0; g < groups.size(); ++g)
            rendered[g] = ingested_group(config, recordings, groups[g].first, groups[g].second);
    }

    Corpus corpus;
    for (auto& group : rendered)
        for (auto& s : group)
            corpus.add(std::move(s));
    return corpus;
}

std::vector<ReportEntry> run_test(const Corpus& corpus, const ExperimentConfig& config)
{
    config.validate();
    const std::size_t n = config.n_per_class;
    for (FaultType type : config.classes) {
        const auto have = corpus.group(type, config.training_load).size();
        if (have < n) {
            throw DataError("class " + std::string(to_string(type)) + " has " + std::to_string(have) +
                            " images at load " + std::to_string(config.training_load) + ", n_per_class is " +
                            std::to_string(n));
        }
    }

    std::vector<std::vector<std::size_t>> test_sets;
    for (int load : config.testing_loads) {
        std::vector<std::size_t> idx;
        for (FaultType type : config.classes) {
            const auto g = corpus.group(type, load);
            idx.insert(idx.end(), g.begin(), g.end());
        }
        if (idx.empty())
            throw DataError("corpus has no images for testing load " + std::to_string(load));
        test_sets.push_back(std::move(idx));
    }

    std::vector<ReportEntry> entries(config.testing_loads.size());
    for (std::size_t t = 0; t < entries.size(); ++t) {
        entries[t].test_id = config.test_id();
        entries[t].kind = config.feature_kind;
        entries[t].n = n;
        entries[t].testing_load = config.testing_loads[t];
        entries[t].tested_per_repetition = test_sets[t].size();
    }

    double seconds = 0.0;
    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        const std::uint64_t seed = derive_seed(
            config.master_seed,
            {kSplitStream, static_cast<std::uint64_t>(config.test_id()), n, static_cast<std::uint64_t>(rep)});
        std::mt19937_64 rng(seed);

        std::vector<std::size_t> train_idx;
        for (FaultType type : config.classes) {
            const auto g = corpus.group(type, config.training_load);
            std::vector<std::size_t> pool(g.begin(), g.end());
            for (std::size_t i = 0; i < n; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
                std::swap(pool[i], pool[pick(rng)]);
            }
            train_idx.insert(train_idx.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
        }
        std::vector<FaultClass> labels;
        labels.reserve(train_idx.size());
        for (std::size_t i : train_idx)
            labels.push_back(corpus[i].label);

        const auto start = std::chrono::steady_clock::now();
        const TrainedModel model = [&] {
            if (config.feature_kind == FeatureKind::FftAmplitude) {
                std::vector<Spectrum> spectra;
                spectra.reserve(train_idx.size());
                for (std::size_t i : train_idx)
                    spectra.push_back(corpus[i].spectrum);
                return train_fft_amplitude(spectra, labels, config.pca_contribution);
            }
            std::vector<ImageMatrix> images(train_idx.size());
            for (std::size_t k = 0; k < train_idx.size(); ++k)
                corpus[train_idx[k]].image.unpack_into(images[k]);
            if (config.feature_kind == FeatureKind::EigenImage)
                return train_eigen_image(images, labels, config.d);
            return train_pca_image(images, labels, config.pca_contribution);
        }();

        for (std::size_t t = 0; t < test_sets.size(); ++t) {
            std::uint64_t correct = 0;
            for (std::size_t i : test_sets[t]) {
                const auto& sample = corpus[i];
                const Eigen::MatrixXd feature = config.feature_kind == FeatureKind::FftAmplitude
                                                    ? model.extract(sample.spectrum)
                                                    : model.extract(sample.image);
                const Classification c = classify(feature, model);
                const auto truth = static_cast<std::size_t>(sample.label.type());
                ++entries[t].confusion[truth][static_cast<std::size_t>(c.label)];
                if (c.label == sample.label.type())
                    ++correct;
            }
            entries[t].repetition_rates.push_back(100.0 * static_cast<double>(correct) /
                                                  static_cast<double>(test_sets[t].size()));
        }
        seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

    for (auto& e : entries) {
        std::uint64_t diag = 0;
        std::uint64_t total = 0;
        for (std::size_t a = 0; a < kFaultTypeCount; ++a) {
            for (std::size_t b = 0; b < kFaultTypeCount; ++b) {
                total += e.confusion[a][b];
                if (a == b)
                    diag += e.confusion[a][b];
            }
        }
        e.mean_rate_pct = 100.0 * static_cast<double>(diag) / static_cast<double>(total);
        e.stddev_pct = sample_stddev(e.repetition_rates);
        e.seconds = config.record_timing ? seconds : std::numeric_limits<double>::quiet_NaN();
    }
    return entries;
}

Report run_suite(const SuiteConfig& suite)
{
    Report report;
    std::map<int, Corpus> corpora; // keyed by fault-size group
    for (int test : suite.tests) {
        ExperimentConfig config = suite.base;
        apply_test_id(config, test);
        // One corpus per fault size covers every training/testing load.
        ExperimentConfig corpus_config = config;
        corpus_config.training_load = 0;
        corpus_config.testing_loads = {0, 1, 2, 3};
        corpus_config.n_per_class = 1;
        const int key = test <= 4 ? 0 : 1;
        auto it = corpora.find(key);
        if (it == corpora.end())
            it = corpora.emplace(key, build_corpus(corpus_config)).first;

        for (FeatureKind kind : suite.kinds) {
            for (std::size_t n : suite.n_values) {
                config.feature_kind = kind;
                config.n_per_class = n;
                auto entries = run_test(it->second, config);
                std::move(entries.begin(), entries.end(), std::back_inserter(report.entries));
            }
        }
    }
    return report;
}

} // namespace specfault
