#include "specfault/experiment.hpp"

#include "specfault/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <unordered_map>

namespace specfault {

namespace {

std::string trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_list(const std::string& value)
{
    std::vector<std::string> items;
    std::size_t start = 0;
    while (true) {
        const auto comma = value.find(',', start);
        std::string item = trim(std::string_view(value).substr(start, comma == std::string::npos ? std::string::npos
                                                                                                  : comma - start));
        if (item.empty())
            throw InvalidArgument("empty item in list '" + value + "'");
        items.push_back(std::move(item));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return items;
}

double to_double(const std::string& key, const std::string& value)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v))
        throw InvalidArgument(key + ": expected a number, got '" + value + "'");
    return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& value)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw InvalidArgument(key + ": expected a non-negative integer, got '" + value + "'");
    return v;
}

int to_load(const std::string& key, const std::string& value)
{
    const auto v = to_uint(key, value);
    if (v >= static_cast<std::uint64_t>(kLoadCount))
        throw InvalidArgument(key + ": load index must be 0..3, got '" + value + "'");
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value)
{
    if (value == "on" || value == "true" || value == "1" || value == "yes")
        return true;
    if (value == "off" || value == "false" || value == "0" || value == "no")
        return false;
    throw InvalidArgument(key + ": expected on/off, got '" + value + "'");
}

using Setter = std::function<void(SuiteConfig&, const std::string&, const std::string&)>;

const std::unordered_map<std::string, Setter>& setters()
{
    static const std::unordered_map<std::string, Setter> table = [] {
        std::unordered_map<std::string, Setter> t;
        auto synth = [&t](const char* key, double SynthParams::*field) {
            t[key] = [field](SuiteConfig& c, const std::string& k, const std::string& v) {
                c.base.synth.*field = to_double(k, v);
            };
        };
        t["source"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            if (v == "synthetic")
                c.base.source = DataSource::Synthetic;
            else if (v == "ingested")
                c.base.source = DataSource::Ingested;
            else
                throw InvalidArgument(k + ": expected synthetic or ingested, got '" + v + "'");
        };
        t["manifest"] = [](SuiteConfig& c, const std::string&, const std::string& v) { c.base.manifest = v; };
        t["profile"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            if (v == "desk")
                c.base.images_per_class_per_load = kDeskImagesPerClass;
            else if (v == "full")
                c.base.images_per_class_per_load = kFullImagesPerClass;
            else
                throw InvalidArgument(k + ": expected desk or full, got '" + v + "'");
        };
        t["tests"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.tests.clear();
            for (const auto& item : split_list(v)) {
                const auto id = to_uint(k, item);
                if (id < 1 || id > 8)
                    throw InvalidArgument(k + ": test ids are 1..8, got '" + item + "'");
                c.tests.push_back(static_cast<int>(id));
            }
        };
        t["fault_size"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.base.fault_size = to_double(k, v);
        };
        t["training_load"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.base.training_load = to_load(k, v);
        };
        t["testing_loads"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.base.testing_loads.clear();
            for (const auto& item : split_list(v))
                c.base.testing_loads.push_back(to_load(k, item));
        };
        t["classes"] = [](SuiteConfig& c, const std::string&, const std::string& v) {
            c.base.classes.clear();
            for (const auto& item : split_list(v))
                c.base.classes.push_back(parse_fault_type(item));
        };
        t["n_per_class"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.n_values.clear();
            for (const auto& item : split_list(v))
                c.n_values.push_back(static_cast<std::size_t>(to_uint(k, item)));
            c.base.n_per_class = c.n_values.front();
        };
        t["repetitions"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.base.repetitions = static_cast<std::size_t>(to_uint(k, v));
        };
        t["feature_kind"] = [](SuiteConfig& c, const std::string&, const std::string& v) {
            c.kinds.clear();
            for (const auto& item : split_list(v))
                c.kinds.push_back(parse_feature_kind(item));
            c.base.feature_kind = c.kinds.front();
        };
        t["d"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.base.d = static_cast<Eigen::Index>(to_uint(k, v));
        };
        t["pca_contribution"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.base.pca_contribution = to_double(k, v);
        };
        t["images_per_class_per_load"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.base.images_per_class_per_load = static_cast<std::size_t>(to_uint(k, v));
        };
        t["image_rows"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.base.image_rows = static_cast<std::size_t>(to_uint(k, v));
        };
        t["image_cols"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.base.image_cols = static_cast<std::size_t>(to_uint(k, v));
        };
        t["master_seed"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.base.master_seed = to_uint(k, v);
        };
        t["timing"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.base.record_timing = to_bool(k, v);
        };
        synth("synth.sample_rate", &SynthParams::sample_rate);
        synth("synth.bpfi_order", &SynthParams::bpfi_order);
        synth("synth.bpfo_order", &SynthParams::bpfo_order);
        synth("synth.bsf_order", &SynthParams::bsf_order);
        synth("synth.resonance_hz", &SynthParams::resonance_hz);
        synth("synth.if_path_hz", &SynthParams::if_path_hz);
        synth("synth.bf_path_hz", &SynthParams::bf_path_hz);
        synth("synth.of_path_hz", &SynthParams::of_path_hz);
        synth("synth.path_gain", &SynthParams::path_gain);
        synth("synth.path_decay_per_s", &SynthParams::path_decay_per_s);
        synth("synth.decay_per_s", &SynthParams::decay_per_s);
        synth("synth.impulse_amplitude", &SynthParams::impulse_amplitude);
        synth("synth.noise_sigma", &SynthParams::noise_sigma);
        synth("synth.jitter", &SynthParams::jitter);
        synth("synth.shaft_amplitude", &SynthParams::shaft_amplitude);
        synth("synth.modulation_depth", &SynthParams::modulation_depth);
        synth("synth.reference_fault_size", &SynthParams::reference_fault_size);
        t["synth.shaft_harmonics"] = [](SuiteConfig& c, const std::string& k, const std::string& v) {
            c.base.synth.shaft_harmonics = static_cast<int>(to_uint(k, v));
        };
        return t;
    }();
    return table;
}

} // namespace

void set_config_value(SuiteConfig& config, const std::string& key, const std::string& value)
{
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end())
        throw InvalidArgument("unknown config key '" + key + "'");
    it->second(config, key, value);
}

ConfigPairs read_config_pairs(std::istream& in)
{
    ConfigPairs pairs;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(std::string_view(line).substr(0, hash));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty() || value.empty())
            throw InvalidArgument("config line " + std::to_string(line_no) + ": empty key or value");
        if (!setters().contains(key))
            throw InvalidArgument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw InvalidArgument("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        pairs.emplace_back(std::move(key), std::move(value));
    }
    return pairs;
}

SuiteConfig resolve_suite_config(const ConfigPairs& pairs)
{
    SuiteConfig config;
    std::set<std::string> seen;
    for (const auto& [k, v] : pairs) {
        if (!setters().contains(k))
            throw InvalidArgument("unknown config key '" + k + "'");
        if (!seen.insert(k).second)
            throw InvalidArgument("duplicate config key '" + k + "'");
    }

    // profile only sets a default image count; an explicit count wins.
    for (const auto& [k, v] : pairs)
        if (k == "profile")
            set_config_value(config, k, v);
    for (const auto& [k, v] : pairs)
        if (k != "profile")
            set_config_value(config, k, v);

    if (config.tests.empty()) {
        config.base.validate();
        config.tests.push_back(config.base.test_id());
    }
    if (!seen.contains("n_per_class"))
        config.n_values = {config.base.n_per_class};
    if (!seen.contains("feature_kind"))
        config.kinds = {config.base.feature_kind};

    // Validate every grid point up front so a bad value fails before any work.
    for (int test : config.tests) {
        ExperimentConfig probe = config.base;
        apply_test_id(probe, test);
        for (auto n : config.n_values) {
            probe.n_per_class = n;
            probe.validate();
        }
    }
    return config;
}

SuiteConfig parse_suite_config(std::istream& in)
{
    return resolve_suite_config(read_config_pairs(in));
}

SuiteConfig load_suite_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    return parse_suite_config(in);
}

} // namespace specfault
