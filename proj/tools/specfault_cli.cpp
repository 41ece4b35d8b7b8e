// Command-line front end. Talks to the library only through the C API.

#include "specfault/specfault.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Failure {
    int code;
};

// Turns a non-OK status into a diagnostic and an exit code.
void check(sf_status status)
{
    if (status == SF_OK)
        return;
    std::cerr << "specfault: " << sf_status_string(status) << ": " << sf_last_error() << '\n';
    throw Failure{status == SF_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData};
}

[[noreturn]] void usage(const std::string& message)
{
    std::cerr << "specfault: " << message << '\n';
    throw Failure{kExitUsage};
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
    void operator()(T* p) const { Destroy(p); }
};

using Config = std::unique_ptr<sf_config, Deleter<sf_config, sf_config_destroy>>;
using CorpusPtr = std::unique_ptr<sf_corpus, Deleter<sf_corpus, sf_corpus_destroy>>;
using ModelPtr = std::unique_ptr<sf_model, Deleter<sf_model, sf_model_destroy>>;
using ReportPtr = std::unique_ptr<sf_report, Deleter<sf_report, sf_report_destroy>>;
using SignalPtr = std::unique_ptr<sf_signal, Deleter<sf_signal, sf_signal_destroy>>;

const char* type_name(sf_fault_type t)
{
    static const char* names[] = {"NO", "IF", "BF", "OF"};
    return names[t];
}

sf_fault_type parse_type(const std::string& s)
{
    for (int t = 0; t < 4; ++t)
        if (s == type_name(static_cast<sf_fault_type>(t)))
            return static_cast<sf_fault_type>(t);
    usage("unknown class '" + s + "' (NO, IF, BF, OF)");
}

sf_raw_format parse_format(const std::string& s)
{
    if (s == "f32" || s == "float32-le") return SF_RAW_FLOAT32_LE;
    if (s == "f64" || s == "float64-le") return SF_RAW_FLOAT64_LE;
    if (s == "csv") return SF_RAW_CSV;
    usage("unknown raw format '" + s + "' (f32, f64, csv)");
}

sf_feature_kind parse_kind(const std::string& s)
{
    if (s == "2dpca") return SF_FEATURE_2DPCA;
    if (s == "pca") return SF_FEATURE_PCA;
    if (s == "fft") return SF_FEATURE_FFT;
    usage("unknown feature kind '" + s + "' (2dpca, pca, fft)");
}

sf_report_format parse_report_format(const std::string& s)
{
    if (s == "csv") return SF_REPORT_CSV;
    if (s == "text") return SF_REPORT_TEXT;
    usage("unknown report format '" + s + "' (csv, text)");
}

sf_label make_label(const std::string& cls, std::optional<double> size, int load)
{
    sf_label label{parse_type(cls), 0.0, load};
    if (label.type == SF_FAULT_NO) {
        if (size)
            usage("class NO takes no --size");
    } else {
        if (!size)
            usage("class " + cls + " needs --size");
        label.fault_size = *size;
    }
    return label;
}

Config make_config(const std::string& path, const std::vector<std::string>& overrides)
{
    sf_config* raw = nullptr;
    check(path.empty() ? sf_config_create(&raw) : sf_config_load(path.c_str(), &raw));
    Config config(raw);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            usage("--set expects key=value, got '" + kv + "'");
        check(sf_config_set(config.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    return config;
}

std::string describe(const sf_label& l)
{
    std::string s = type_name(l.type);
    if (l.type != SF_FAULT_NO) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.3f", l.fault_size);
        s += buf;
    }
    return s + " L" + std::to_string(l.load);
}

void print_result(const std::string& item, const sf_classification& c)
{
    std::printf("%s\t%s\t%zu\t%.6g\n", item.c_str(), type_name(c.label), c.index, c.distance);
}

std::string report_text(const sf_report* report, sf_report_format format)
{
    size_t needed = 0;
    check(sf_report_format_to(report, format, nullptr, 0, &needed));
    std::string text(needed + 1, '\0');
    check(sf_report_format_to(report, format, text.data(), text.size(), &needed));
    text.resize(needed);
    return text;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bearing fault diagnosis from spectrum images"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Synthesize a spectrum-image corpus or one raw signal");
    std::string gen_config, gen_out, gen_manifest, gen_signal, gen_class = "NO", gen_format = "f64";
    std::vector<std::string> gen_set;
    std::optional<double> gen_size;
    int gen_load = 0;
    double gen_duration = 10.0;
    std::uint64_t gen_seed = 1;
    gen->add_option("--config", gen_config, "key = value config file")->check(CLI::ExistingFile);
    gen->add_option("--set", gen_set, "override a config key (key=value)");
    gen->add_option("--out", gen_out, "corpus output directory");
    gen->add_option("--manifest", gen_manifest, "corpus manifest path (default OUT/corpus.tsv)");
    gen->add_option("--signal", gen_signal, "write one raw signal here instead of a corpus");
    gen->add_option("--class", gen_class, "signal class: NO, IF, BF, OF");
    gen->add_option("--size", gen_size, "signal fault size in inches");
    gen->add_option("--load", gen_load, "signal load 0..3");
    gen->add_option("--duration", gen_duration, "signal duration in seconds");
    gen->add_option("--seed", gen_seed, "signal seed");
    gen->add_option("--format", gen_format, "signal format: f32, f64, csv");

    // ingest
    auto* ing = app.add_subcommand("ingest", "Add raw recordings to a recordings manifest");
    std::string ing_manifest, ing_format = "f64", ing_class;
    std::optional<double> ing_size;
    double ing_rate = 12000.0;
    int ing_load = 0;
    std::vector<std::string> ing_files;
    ing->add_option("--manifest", ing_manifest, "recordings manifest (created if missing)")->required();
    ing->add_option("--format", ing_format, "f32, f64 or csv");
    ing->add_option("--rate", ing_rate, "sample rate in Hz");
    ing->add_option("--class", ing_class, "NO, IF, BF or OF")->required();
    ing->add_option("--size", ing_size, "fault size in inches (faults only)");
    ing->add_option("--load", ing_load, "load condition 0..3");
    ing->add_option("files", ing_files, "raw recordings")->required()->check(CLI::ExistingFile);

    // train
    auto* tr = app.add_subcommand("train", "Fit a feature basis and store a model");
    std::string tr_corpus, tr_kind = "2dpca", tr_out;
    std::size_t tr_d = 10, tr_n = 0;
    double tr_contribution = 0.90;
    int tr_load = -1;
    std::uint64_t tr_seed = 0;
    tr->add_option("--corpus", tr_corpus, "corpus manifest")->required()->check(CLI::ExistingFile);
    tr->add_option("--kind", tr_kind, "2dpca, pca or fft");
    tr->add_option("--d", tr_d, "eigenvectors kept (2dpca)");
    tr->add_option("--contribution", tr_contribution, "cumulative contribution (pca, fft)");
    tr->add_option("--load", tr_load, "train on one load only (-1 for all)");
    tr->add_option("--n", tr_n, "samples drawn per class and load (0 for all)");
    tr->add_option("--seed", tr_seed, "seed for the per-class draw");
    tr->add_option("--out", tr_out, "model file")->required();

    // classify
    auto* cl = app.add_subcommand("classify", "Label images, spectra or a whole corpus");
    std::string cl_model, cl_corpus;
    std::vector<std::string> cl_images, cl_spectra;
    bool cl_quiet = false;
    cl->add_option("--model", cl_model, "model file")->required()->check(CLI::ExistingFile);
    cl->add_option("--image", cl_images, "PGM spectrum image")->check(CLI::ExistingFile);
    cl->add_option("--spectrum", cl_spectra, "raw float64 spectrum (512 values)")->check(CLI::ExistingFile);
    cl->add_option("--corpus", cl_corpus, "corpus manifest; prints accuracy")->check(CLI::ExistingFile);
    cl->add_flag("--quiet", cl_quiet, "corpus mode: summary line only");

    // experiment
    auto* ex = app.add_subcommand("experiment", "Run a suite of classification tests");
    std::string ex_config, ex_csv, ex_text;
    std::vector<std::string> ex_set;
    ex->add_option("--config", ex_config, "key = value config file")->check(CLI::ExistingFile);
    ex->add_option("--set", ex_set, "override a config key (key=value)");
    ex->add_option("--csv", ex_csv, "write the CSV report here");
    ex->add_option("--text", ex_text, "write the text tables here");

    // report
    auto* rp = app.add_subcommand("report", "Re-render a CSV report");
    std::string rp_csv, rp_format = "text", rp_out;
    rp->add_option("csv", rp_csv, "CSV report")->required()->check(CLI::ExistingFile);
    rp->add_option("--format", rp_format, "text or csv");
    rp->add_option("--out", rp_out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            Config config = make_config(gen_config, gen_set);
            if (!gen_signal.empty()) {
                const sf_label label = make_label(gen_class, gen_size, gen_load);
                sf_signal* raw = nullptr;
                check(sf_signal_synthesize(config.get(), label, gen_duration, gen_seed, &raw));
                SignalPtr signal(raw);
                check(sf_signal_write(signal.get(), gen_signal.c_str(), parse_format(gen_format)));
                std::printf("wrote %zu samples (%s) to %s\n", sf_signal_length(signal.get()),
                            describe(label).c_str(), gen_signal.c_str());
                return 0;
            }
            if (gen_out.empty())
                usage("generate needs --out (corpus) or --signal");
            const std::string manifest = gen_manifest.empty() ? gen_out + "/corpus.tsv" : gen_manifest;
            sf_corpus* raw = nullptr;
            check(sf_corpus_build(config.get(), &raw));
            CorpusPtr corpus(raw);
            check(sf_corpus_write(corpus.get(), gen_out.c_str(), manifest.c_str()));
            std::printf("wrote %zu samples, manifest %s\n", sf_corpus_size(corpus.get()), manifest.c_str());
        } else if (ing->parsed()) {
            const sf_label label = make_label(ing_class, ing_size, ing_load);
            const sf_raw_format format = parse_format(ing_format);
            for (const auto& f : ing_files) {
                size_t samples = 0;
                check(sf_recordings_append(ing_manifest.c_str(), f.c_str(), format, ing_rate, label, &samples));
                std::printf("%s\t%zu samples\t%zu windows\t%s\n", f.c_str(), samples, samples / SF_FFT_SIZE,
                            describe(label).c_str());
            }
        } else if (tr->parsed()) {
            sf_corpus* raw_corpus = nullptr;
            check(sf_corpus_load(tr_corpus.c_str(), &raw_corpus));
            CorpusPtr corpus(raw_corpus);
            sf_model* raw = nullptr;
            check(sf_model_train(corpus.get(), parse_kind(tr_kind), tr_load, tr_n, tr_seed, tr_d, tr_contribution,
                                 &raw));
            ModelPtr model(raw);
            check(sf_model_save(model.get(), tr_out.c_str()));
            std::printf("trained %s model on %zu samples, dimension %zu, saved to %s\n", tr_kind.c_str(),
                        sf_model_size(model.get()), sf_model_dimension(model.get()), tr_out.c_str());
        } else if (cl->parsed()) {
            if (cl_images.empty() && cl_spectra.empty() && cl_corpus.empty())
                usage("classify needs --image, --spectrum or --corpus");
            sf_model* raw = nullptr;
            check(sf_model_load(cl_model.c_str(), &raw));
            ModelPtr model(raw);
            sf_classification result{};
            for (const auto& img : cl_images) {
                check(sf_model_classify_pgm(model.get(), img.c_str(), &result));
                print_result(img, result);
            }
            for (const auto& sp : cl_spectra) {
                std::vector<double> mags(SF_SPECTRUM_BINS);
                check(sf_read_spectrum(sp.c_str(), mags.data()));
                check(sf_model_classify_spectrum(model.get(), mags.data(), &result));
                print_result(sp, result);
            }
            if (!cl_corpus.empty()) {
                sf_corpus* raw_corpus = nullptr;
                check(sf_corpus_load(cl_corpus.c_str(), &raw_corpus));
                CorpusPtr corpus(raw_corpus);
                const size_t total = sf_corpus_size(corpus.get());
                size_t correct = 0;
                for (size_t i = 0; i < total; ++i) {
                    sf_label truth{};
                    check(sf_corpus_label(corpus.get(), i, &truth));
                    check(sf_model_classify_sample(model.get(), corpus.get(), i, &result));
                    correct += result.label == truth.type;
                    if (!cl_quiet)
                        print_result(std::to_string(i) + "\t" + describe(truth), result);
                }
                std::printf("accuracy %zu/%zu (%.2f%%)\n", correct, total,
                            total ? 100.0 * static_cast<double>(correct) / static_cast<double>(total) : 0.0);
            }
        } else if (ex->parsed()) {
            Config config = make_config(ex_config, ex_set);
            sf_report* raw = nullptr;
            check(sf_experiment_run(config.get(), &raw));
            ReportPtr report(raw);
            if (!ex_csv.empty())
                check(sf_report_write(report.get(), ex_csv.c_str(), SF_REPORT_CSV));
            if (!ex_text.empty())
                check(sf_report_write(report.get(), ex_text.c_str(), SF_REPORT_TEXT));
            if (ex_csv.empty() && ex_text.empty())
                std::cout << report_text(report.get(), SF_REPORT_TEXT);
        } else if (rp->parsed()) {
            sf_report* raw = nullptr;
            check(sf_report_load_csv(rp_csv.c_str(), &raw));
            ReportPtr report(raw);
            const sf_report_format format = parse_report_format(rp_format);
            if (rp_out.empty())
                std::cout << report_text(report.get(), format);
            else
                check(sf_report_write(report.get(), rp_out.c_str(), format));
        }
    } catch (const Failure& f) {
        return f.code;
    }
    return 0;
}
