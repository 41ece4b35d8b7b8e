#include "specfault/model_io.hpp"

#include "specfault/error.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>

namespace specfault {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

namespace {

using Magic = std::array<char, 8>;
constexpr Magic kMagic2d = {'S', 'F', '2', 'D', 'B', 'A', 'S', '\0'};
constexpr Magic kMagicPca = {'S', 'F', 'P', 'C', 'B', 'A', 'S', '\0'};
constexpr Magic kMagicModel = {'S', 'F', 'M', 'O', 'D', 'E', 'L', '\0'};

// Upper bound on any single matrix dimension read from disk.
constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 28;

template <typename T>
void put(std::ostream& out, T v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in)
{
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in)
        throw DataError("model file is truncated");
    return v;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m)
{
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Eigen::MatrixXd get_matrix(std::istream& in)
{
    const auto rows = get<std::uint64_t>(in);
    const auto cols = get<std::uint64_t>(in);
    if (rows > kMaxDim || cols > kMaxDim || rows * cols > kMaxDim)
        throw DataError("model file declares an implausible matrix size");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in)
        throw DataError("model file is truncated");
    return m;
}

void put_vector(std::ostream& out, const Eigen::VectorXd& v)
{
    put<std::uint64_t>(out, static_cast<std::uint64_t>(v.size()));
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Eigen::VectorXd get_vector(std::istream& in)
{
    const auto n = get<std::uint64_t>(in);
    if (n > kMaxDim)
        throw DataError("model file declares an implausible vector size");
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in)
        throw DataError("model file is truncated");
    return v;
}

void put_header(std::ostream& out, const Magic& magic)
{
    out.write(magic.data(), magic.size());
    put<std::uint32_t>(out, kModelFormatVersion);
}

void expect_header(std::istream& in, const Magic& magic, const char* what)
{
    Magic got{};
    in.read(got.data(), got.size());
    if (!in || got != magic)
        throw DataError(std::string("not a ") + what + " file");
    const auto version = get<std::uint32_t>(in);
    if (version != kModelFormatVersion)
        throw DataError(std::string(what) + " file has unsupported version " + std::to_string(version));
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path.string() + "'");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    return in;
}

void finish(std::ostream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

} // namespace

void write_basis(std::ostream& out, const EigenBasis2D& basis)
{
    put_header(out, kMagic2d);
    put_matrix(out, basis.mean_image);
    put_vector(out, basis.eigenvalues);
    put_matrix(out, basis.basis);
}

void write_basis(std::ostream& out, const PcaBasis& basis)
{
    put_header(out, kMagicPca);
    put<double>(out, basis.contribution);
    put_vector(out, basis.mean);
    put_vector(out, basis.eigenvalues);
    put_matrix(out, basis.components);
}

EigenBasis2D read_basis_2d(std::istream& in)
{
    expect_header(in, kMagic2d, "2DPCA basis");
    EigenBasis2D b;
    b.mean_image = get_matrix(in);
    b.eigenvalues = get_vector(in);
    b.basis = get_matrix(in);
    if (b.basis.rows() != b.mean_image.cols() || b.eigenvalues.size() != b.mean_image.cols())
        throw DataError("2DPCA basis dimensions are inconsistent");
    return b;
}

PcaBasis read_basis_pca(std::istream& in)
{
    expect_header(in, kMagicPca, "PCA basis");
    PcaBasis b;
    b.contribution = get<double>(in);
    b.mean = get_vector(in);
    b.eigenvalues = get_vector(in);
    b.components = get_matrix(in);
    if (b.components.rows() != b.mean.size())
        throw DataError("PCA basis dimensions are inconsistent");
    return b;
}

void write_basis(const std::filesystem::path& path, const EigenBasis2D& basis)
{
    auto out = open_out(path);
    write_basis(out, basis);
    finish(out, path);
}

void write_basis(const std::filesystem::path& path, const PcaBasis& basis)
{
    auto out = open_out(path);
    write_basis(out, basis);
    finish(out, path);
}

EigenBasis2D read_basis_2d(const std::filesystem::path& path)
{
    auto in = open_in(path);
    return read_basis_2d(in);
}

PcaBasis read_basis_pca(const std::filesystem::path& path)
{
    auto in = open_in(path);
    return read_basis_pca(in);
}

void save_model(const std::filesystem::path& path, const TrainedModel& model)
{
    auto out = open_out(path);
    put_header(out, kMagicModel);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.kind()));
    std::visit([&](const auto& b) { write_basis(out, b); }, model.basis());
    put<std::uint64_t>(out, model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        const auto& label = model.labels()[i];
        put<std::uint8_t>(out, static_cast<std::uint8_t>(label.type()));
        put<std::uint8_t>(out, label.size() ? 1 : 0);
        put<double>(out, label.size().value_or(0.0));
        put_matrix(out, model.features()[i]);
    }
    finish(out, path);
}

TrainedModel load_model(const std::filesystem::path& path)
{
    auto in = open_in(path);
    expect_header(in, kMagicModel, "model");
    const auto kind_code = get<std::uint32_t>(in);
    if (kind_code > 2)
        throw DataError("model file has unknown feature kind " + std::to_string(kind_code));
    const auto kind = static_cast<FeatureKind>(kind_code);
    TrainedModel::Basis basis = kind == FeatureKind::EigenImage ? TrainedModel::Basis(read_basis_2d(in))
                                                                : TrainedModel::Basis(read_basis_pca(in));
    const auto count = get<std::uint64_t>(in);
    if (count == 0 || count > kMaxDim)
        throw DataError("model file declares an invalid training-set size");
    std::vector<Eigen::MatrixXd> features;
    std::vector<FaultClass> labels;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto type = get<std::uint8_t>(in);
        const auto has_size = get<std::uint8_t>(in);
        const auto size = get<double>(in);
        if (type >= kFaultTypeCount)
            throw DataError("model file has an invalid class code");
        try {
            labels.emplace_back(static_cast<FaultType>(type), has_size ? std::optional<double>(size) : std::nullopt);
        } catch (const InvalidArgument& e) {
            throw DataError(std::string("model file label: ") + e.what());
        }
        features.push_back(get_matrix(in));
    }
    try {
        return TrainedModel(kind, std::move(basis), std::move(features), std::move(labels));
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("model file is inconsistent: ") + e.what());
    }
}

} // namespace specfault
