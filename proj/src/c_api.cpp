#include "specfault/specfault.h"

#include "specfault/classifier.hpp"
#include "specfault/corpus.hpp"
#include "specfault/error.hpp"
#include "specfault/experiment.hpp"
#include "specfault/model_io.hpp"
#include "specfault/spectrum.hpp"
#include "specfault/vibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <new>
#include <optional>
#include <random>
#include <sstream>
#include <string>

using namespace specfault;

struct sf_signal {
    Signal signal;
};

struct sf_config {
    ConfigPairs pairs;
};

struct sf_corpus {
    Corpus corpus;
    double bin_width = kDefaultSampleRate / static_cast<double>(kFftSize);
};

struct sf_model {
    TrainedModel model;
};

struct sf_report {
    Report report;
};

namespace {

thread_local std::string g_last_error;

sf_status fail(sf_status status, const std::string& message)
{
    g_last_error = message;
    return status;
}

template <typename F>
sf_status guarded(F&& body)
{
    g_last_error.clear();
    try {
        body();
        return SF_OK;
    } catch (const InvalidArgument& e) {
        return fail(SF_ERR_INVALID_ARGUMENT, e.what());
    } catch (const IoError& e) {
        return fail(SF_ERR_IO, e.what());
    } catch (const DataError& e) {
        return fail(SF_ERR_DATA, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(SF_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SF_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SF_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SF_ERR_INTERNAL, "unknown error");
    }
}

void require(bool condition, const char* what)
{
    if (!condition)
        throw InvalidArgument(what);
}

FaultType to_type(sf_fault_type t)
{
    require(t >= SF_FAULT_NO && t <= SF_FAULT_OF, "fault type out of range");
    return static_cast<FaultType>(t);
}

FeatureKind to_kind(sf_feature_kind k)
{
    require(k >= SF_FEATURE_2DPCA && k <= SF_FEATURE_FFT, "feature kind out of range");
    return static_cast<FeatureKind>(k);
}

RawFormat to_format(sf_raw_format f)
{
    switch (f) {
    case SF_RAW_FLOAT32_LE: return RawFormat::Float32LE;
    case SF_RAW_FLOAT64_LE: return RawFormat::Float64LE;
    case SF_RAW_CSV: return RawFormat::Csv;
    }
    throw InvalidArgument("raw format out of range");
}

ReportFormat to_report_format(sf_report_format f)
{
    require(f == SF_REPORT_CSV || f == SF_REPORT_TEXT, "report format out of range");
    return f == SF_REPORT_CSV ? ReportFormat::Csv : ReportFormat::Text;
}

FaultClass to_class(const sf_label& label)
{
    const FaultType type = to_type(label.type);
    if (type == FaultType::NO) {
        require(label.fault_size == 0.0, "a normal label takes no fault size");
        return FaultClass::normal();
    }
    return FaultClass(type, label.fault_size);
}

sf_label from_sample(const CorpusSample& s)
{
    return {static_cast<sf_fault_type>(s.label.type()), s.label.size().value_or(0.0), s.load.index()};
}

sf_classification from_result(const Classification& c)
{
    return {static_cast<sf_fault_type>(c.label), c.index, c.distance};
}

SuiteConfig resolve(const sf_config* config)
{
    return config ? resolve_suite_config(config->pairs) : resolve_suite_config({});
}

template <typename T>
void out_handle(T** out, T* value)
{
    *out = value;
}

} // namespace

extern "C" {

uint32_t sf_api_version(void) { return SF_API_VERSION; }

const char* sf_last_error(void) { return g_last_error.c_str(); }

const char* sf_status_string(sf_status status)
{
    switch (status) {
    case SF_OK: return "ok";
    case SF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SF_ERR_DATA: return "data error";
    case SF_ERR_IO: return "i/o error";
    case SF_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

sf_status sf_signal_ingest(const char* path, sf_raw_format format, double sample_rate, sf_label label,
                           sf_signal** out)
{
    return guarded([&] {
        require(path && out, "null argument");
        *out = nullptr;
        Signal s = ingest_raw(path, to_format(format), sample_rate, to_class(label), LoadCondition(label.load));
        out_handle(out, new sf_signal{std::move(s)});
    });
}

sf_status sf_signal_synthesize(const sf_config* config, sf_label label, double duration_s, uint64_t seed,
                               sf_signal** out)
{
    return guarded([&] {
        require(out, "null argument");
        *out = nullptr;
        SuiteConfig suite;
        if (config)
            for (const auto& [k, v] : config->pairs)
                set_config_value(suite, k, v);
        Signal s = synth_bearing_signal(suite.base.synth, to_class(label), LoadCondition(label.load), duration_s,
                                        seed);
        out_handle(out, new sf_signal{std::move(s)});
    });
}

size_t sf_signal_length(const sf_signal* signal) { return signal ? signal->signal.size() : 0; }

double sf_signal_sample_rate(const sf_signal* signal) { return signal ? signal->signal.sample_rate() : 0.0; }

const double* sf_signal_samples(const sf_signal* signal)
{
    return signal ? signal->signal.samples().data() : nullptr;
}

sf_status sf_signal_write(const sf_signal* signal, const char* path, sf_raw_format format)
{
    return guarded([&] {
        require(signal && path, "null argument");
        write_raw(path, to_format(format), signal->signal.samples());
    });
}

void sf_signal_destroy(sf_signal* signal) { delete signal; }

sf_status sf_spectrum(const double* window, size_t length, double sample_rate, double* magnitudes_out)
{
    return guarded([&] {
        require(window && magnitudes_out, "null argument");
        const Spectrum s = fft_magnitude(std::span<const double>(window, length), sample_rate);
        std::copy(s.magnitudes().begin(), s.magnitudes().end(), magnitudes_out);
    });
}

sf_status sf_rasterize(const double* magnitudes, size_t rows, size_t cols, uint8_t* pixels_out)
{
    return guarded([&] {
        require(magnitudes && pixels_out, "null argument");
        const Spectrum s(std::vector<double>(magnitudes, magnitudes + kSpectrumBins), 1.0);
        const PackedImage img = rasterize_packed(s, rows, cols);
        std::copy(img.levels().begin(), img.levels().end(), pixels_out);
    });
}

sf_status sf_read_spectrum(const char* path, double* magnitudes_out)
{
    return guarded([&] {
        require(path && magnitudes_out, "null argument");
        const Spectrum s = read_spectrum(path, 1.0);
        std::copy(s.magnitudes().begin(), s.magnitudes().end(), magnitudes_out);
    });
}

sf_status sf_write_pgm(const char* path, const uint8_t* pixels, size_t rows, size_t cols)
{
    return guarded([&] {
        require(path && pixels, "null argument");
        require(rows > 0 && cols > 0, "image must be non-empty");
        write_pgm(path, PackedImage(rows, cols, std::vector<uint8_t>(pixels, pixels + rows * cols)));
    });
}

sf_status sf_config_create(sf_config** out)
{
    return guarded([&] {
        require(out, "null argument");
        out_handle(out, new sf_config{});
    });
}

sf_status sf_config_load(const char* path, sf_config** out)
{
    return guarded([&] {
        require(path && out, "null argument");
        *out = nullptr;
        std::ifstream in(path);
        if (!in)
            throw IoError(std::string("cannot open '") + path + "'");
        ConfigPairs pairs = read_config_pairs(in);
        resolve_suite_config(pairs); // report bad values at load time
        out_handle(out, new sf_config{std::move(pairs)});
    });
}

sf_status sf_config_set(sf_config* config, const char* key, const char* value)
{
    return guarded([&] {
        require(config && key && value, "null argument");
        SuiteConfig scratch;
        set_config_value(scratch, key, value); // checks the key and parses the value
        auto it = std::find_if(config->pairs.begin(), config->pairs.end(),
                               [&](const auto& p) { return p.first == key; });
        if (it != config->pairs.end())
            it->second = value;
        else
            config->pairs.emplace_back(key, value);
    });
}

void sf_config_destroy(sf_config* config) { delete config; }

sf_status sf_corpus_build(const sf_config* config, sf_corpus** out)
{
    return guarded([&] {
        require(out, "null argument");
        *out = nullptr;
        const SuiteConfig suite = resolve(config);
        ExperimentConfig c = suite.base;
        apply_test_id(c, suite.tests.front());
        c.training_load = 0;
        c.testing_loads = {0, 1, 2, 3};
        c.n_per_class = 1;
        auto* handle = new sf_corpus{build_corpus(c)};
        if (handle->corpus.size() > 0)
            handle->bin_width = handle->corpus[0].spectrum.bin_width();
        out_handle(out, handle);
    });
}

sf_status sf_corpus_load(const char* manifest, sf_corpus** out)
{
    return guarded([&] {
        require(manifest && out, "null argument");
        *out = nullptr;
        auto* handle = new sf_corpus{read_corpus(manifest)};
        if (handle->corpus.size() > 0)
            handle->bin_width = handle->corpus[0].spectrum.bin_width();
        out_handle(out, handle);
    });
}

sf_status sf_corpus_write(const sf_corpus* corpus, const char* dir, const char* manifest)
{
    return guarded([&] {
        require(corpus && dir && manifest, "null argument");
        write_corpus(dir, manifest, corpus->corpus);
    });
}

size_t sf_corpus_size(const sf_corpus* corpus) { return corpus ? corpus->corpus.size() : 0; }

sf_status sf_corpus_label(const sf_corpus* corpus, size_t index, sf_label* out)
{
    return guarded([&] {
        require(corpus && out, "null argument");
        require(index < corpus->corpus.size(), "sample index out of range");
        *out = from_sample(corpus->corpus[index]);
    });
}

void sf_corpus_destroy(sf_corpus* corpus) { delete corpus; }

sf_status sf_recordings_append(const char* manifest, const char* raw_path, sf_raw_format format,
                               double sample_rate, sf_label label, size_t* samples_out)
{
    return guarded([&] {
        require(manifest && raw_path, "null argument");
        RecordingEntry entry;
        entry.path = std::filesystem::absolute(raw_path);
        entry.format = to_format(format);
        entry.sample_rate = sample_rate;
        entry.label = to_class(label);
        entry.load = LoadCondition(label.load);
        const Signal s = ingest_raw(entry.path, entry.format, sample_rate, entry.label, entry.load);

        std::vector<RecordingEntry> entries;
        if (std::filesystem::exists(manifest))
            entries = read_recordings_manifest(manifest);
        entries.push_back(entry);
        write_recordings_manifest(manifest, entries);
        if (samples_out)
            *samples_out = s.size();
    });
}

sf_status sf_model_train(const sf_corpus* corpus, sf_feature_kind kind, int load, size_t n_per_class,
                         uint64_t seed, size_t d, double contribution, sf_model** out)
{
    return guarded([&] {
        require(corpus && out, "null argument");
        *out = nullptr;
        const FeatureKind fk = to_kind(kind);
        require(load >= -1 && load < kLoadCount, "load must be -1 (all) or 0..3");

        std::mt19937_64 rng(seed);
        std::vector<std::size_t> chosen;
        for (int t = 0; t < kFaultTypeCount; ++t) {
            for (int l = 0; l < kLoadCount; ++l) {
                if (load >= 0 && l != load)
                    continue;
                const auto group = corpus->corpus.group(static_cast<FaultType>(t), l);
                std::vector<std::size_t> idx(group.begin(), group.end());
                if (n_per_class > 0 && !idx.empty()) {
                    if (idx.size() < n_per_class)
                        throw DataError("class " + std::string(to_string(static_cast<FaultType>(t))) +
                                        " at load " + std::to_string(l) + " has " + std::to_string(idx.size()) +
                                        " samples, fewer than n = " + std::to_string(n_per_class));
                    for (std::size_t i = 0; i < n_per_class; ++i) {
                        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
                        std::swap(idx[i], idx[pick(rng)]);
                    }
                    idx.resize(n_per_class);
                }
                chosen.insert(chosen.end(), idx.begin(), idx.end());
            }
        }
        if (chosen.empty())
            throw DataError("no training samples match the requested load");

        std::vector<FaultClass> labels;
        for (auto i : chosen)
            labels.push_back(corpus->corpus[i].label);

        std::optional<TrainedModel> model;
        if (fk == FeatureKind::FftAmplitude) {
            std::vector<Spectrum> spectra;
            for (auto i : chosen)
                spectra.push_back(corpus->corpus[i].spectrum);
            model.emplace(train_fft_amplitude(spectra, std::move(labels), contribution));
        } else {
            std::vector<ImageMatrix> images(chosen.size());
            for (std::size_t j = 0; j < chosen.size(); ++j)
                corpus->corpus[chosen[j]].image.unpack_into(images[j]);
            if (fk == FeatureKind::EigenImage) {
                require(d > 0 && d <= static_cast<size_t>(std::numeric_limits<Eigen::Index>::max()),
                        "d out of range");
                model.emplace(train_eigen_image(images, std::move(labels), static_cast<Eigen::Index>(d)));
            } else {
                model.emplace(train_pca_image(images, std::move(labels), contribution));
            }
        }
        out_handle(out, new sf_model{std::move(*model)});
    });
}

sf_status sf_model_save(const sf_model* model, const char* path)
{
    return guarded([&] {
        require(model && path, "null argument");
        save_model(path, model->model);
    });
}

sf_status sf_model_load(const char* path, sf_model** out)
{
    return guarded([&] {
        require(path && out, "null argument");
        *out = nullptr;
        out_handle(out, new sf_model{load_model(path)});
    });
}

sf_feature_kind sf_model_kind(const sf_model* model)
{
    return model ? static_cast<sf_feature_kind>(model->model.kind()) : SF_FEATURE_2DPCA;
}

size_t sf_model_size(const sf_model* model) { return model ? model->model.size() : 0; }

size_t sf_model_dimension(const sf_model* model)
{
    if (!model)
        return 0;
    if (const auto* b = std::get_if<EigenBasis2D>(&model->model.basis()))
        return static_cast<size_t>(b->d());
    return static_cast<size_t>(std::get<PcaBasis>(model->model.basis()).k());
}

sf_status sf_model_classify_sample(const sf_model* model, const sf_corpus* corpus, size_t index,
                                   sf_classification* out)
{
    return guarded([&] {
        require(model && corpus && out, "null argument");
        require(index < corpus->corpus.size(), "sample index out of range");
        const CorpusSample& s = corpus->corpus[index];
        const Eigen::MatrixXd f = model->model.kind() == FeatureKind::FftAmplitude ? model->model.extract(s.spectrum)
                                                                                   : model->model.extract(s.image);
        *out = from_result(classify(f, model->model));
    });
}

sf_status sf_model_classify_pgm(const sf_model* model, const char* pgm_path, sf_classification* out)
{
    return guarded([&] {
        require(model && pgm_path && out, "null argument");
        if (model->model.kind() == FeatureKind::FftAmplitude)
            throw InvalidArgument("an FFT-amplitude model classifies spectra, not images");
        const PackedImage img = read_pgm(pgm_path);
        *out = from_result(classify(model->model.extract(img), model->model));
    });
}

sf_status sf_model_classify_spectrum(const sf_model* model, const double* magnitudes, sf_classification* out)
{
    return guarded([&] {
        require(model && magnitudes && out, "null argument");
        const Spectrum s(std::vector<double>(magnitudes, magnitudes + kSpectrumBins), 1.0);
        if (model->model.kind() == FeatureKind::FftAmplitude) {
            *out = from_result(classify(model->model.extract(s), model->model));
            return;
        }
        Eigen::Index rows = 0, cols = 0;
        if (const auto* b = std::get_if<EigenBasis2D>(&model->model.basis())) {
            rows = b->rows();
            cols = b->cols();
        } else {
            const auto& p = std::get<PcaBasis>(model->model.basis());
            // Flattened PCA bases do not record a shape; assume the default row count.
            rows = static_cast<Eigen::Index>(kImageRows);
            cols = p.dim() / rows;
            if (rows * cols != p.dim())
                throw InvalidArgument("cannot infer the image shape of this PCA model");
        }
        const PackedImage img = rasterize_packed(s, static_cast<size_t>(rows), static_cast<size_t>(cols));
        *out = from_result(classify(model->model.extract(img), model->model));
    });
}

void sf_model_destroy(sf_model* model) { delete model; }

sf_status sf_experiment_run(const sf_config* config, sf_report** out)
{
    return guarded([&] {
        require(out, "null argument");
        *out = nullptr;
        out_handle(out, new sf_report{run_suite(resolve(config))});
    });
}

sf_status sf_report_load_csv(const char* path, sf_report** out)
{
    return guarded([&] {
        require(path && out, "null argument");
        *out = nullptr;
        out_handle(out, new sf_report{load_report_csv(path)});
    });
}

sf_status sf_report_write(const sf_report* report, const char* path, sf_report_format format)
{
    return guarded([&] {
        require(report && path, "null argument");
        emit_report(std::filesystem::path(path), report->report, to_report_format(format));
    });
}

sf_status sf_report_format_to(const sf_report* report, sf_report_format format, char* buf, size_t cap,
                              size_t* needed)
{
    return guarded([&] {
        require(report && needed, "null argument");
        require(buf || cap == 0, "null buffer with nonzero capacity");
        std::ostringstream os;
        emit_report(os, report->report, to_report_format(format));
        const std::string text = os.str();
        *needed = text.size();
        if (cap > 0) {
            const size_t n = std::min(cap - 1, text.size());
            std::memcpy(buf, text.data(), n);
            buf[n] = '\0';
        }
    });
}

size_t sf_report_row_count(const sf_report* report) { return report ? report->report.entries.size() : 0; }

sf_status sf_report_get_row(const sf_report* report, size_t index, sf_report_row* out)
{
    return guarded([&] {
        require(report && out, "null argument");
        require(index < report->report.entries.size(), "row index out of range");
        const ReportEntry& e = report->report.entries[index];
        *out = {e.test_id,       static_cast<sf_feature_kind>(e.kind), e.n, e.testing_load, e.mean_rate_pct,
                e.stddev_pct, e.seconds};
    });
}

sf_status sf_report_get_confusion(const sf_report* report, size_t index, uint64_t* counts_out)
{
    return guarded([&] {
        require(report && counts_out, "null argument");
        require(index < report->report.entries.size(), "row index out of range");
        const auto& c = report->report.entries[index].confusion;
        for (int i = 0; i < kFaultTypeCount; ++i)
            for (int j = 0; j < kFaultTypeCount; ++j)
                counts_out[i * kFaultTypeCount + j] = c[i][j];
    });
}

void sf_report_destroy(sf_report* report) { delete report; }

} // extern "C"
