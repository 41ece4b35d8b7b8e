#include "specfault/classifier.hpp"
#include "specfault/error.hpp"
#include "specfault/model_io.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace specfault;
using testing::random_matrix;

namespace {

std::vector<ImageMatrix> images(std::uint64_t seed, int m)
{
    std::mt19937_64 rng(seed);
    std::vector<ImageMatrix> v;
    for (int i = 0; i < m; ++i)
        v.push_back(random_matrix(rng, 6, 9, 0.0, 1.0));
    return v;
}

std::vector<FaultClass> labels(std::size_t n)
{
    std::vector<FaultClass> v;
    for (std::size_t i = 0; i < n; ++i)
        v.push_back(i % 2 ? FaultClass(FaultType::OF, 0.021) : FaultClass::normal());
    return v;
}

void check_same(const TrainedModel& a, const TrainedModel& b)
{
    CHECK(a.kind() == b.kind());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.features()[i] == b.features()[i]);
        CHECK(a.labels()[i] == b.labels()[i]);
    }
}

} // namespace

TEST_CASE("2DPCA basis round-trip is exact")
{
    const auto b = fit_2dpca(images(1, 5), 4);
    std::stringstream ss;
    write_basis(ss, b);
    const auto r = read_basis_2d(ss);
    CHECK(r.mean_image == b.mean_image);
    CHECK(r.eigenvalues == b.eigenvalues);
    CHECK(r.basis == b.basis);
}

TEST_CASE("PCA basis round-trip is exact")
{
    std::mt19937_64 rng(2);
    const auto b = fit_pca(random_matrix(rng, 7, 30), 0.8);
    const auto dir = testing::scratch_dir("basis_pca");
    write_basis(dir / "b.bin", b);
    const auto r = read_basis_pca(dir / "b.bin");
    CHECK(r.mean == b.mean);
    CHECK(r.components == b.components);
    CHECK(r.eigenvalues == b.eigenvalues);
    CHECK(r.contribution == b.contribution);
    CHECK_THROWS_AS(read_basis_2d(dir / "b.bin"), DataError);
}

TEST_CASE("models round-trip for each kind")
{
    const auto dir = testing::scratch_dir("model");
    const auto imgs = images(3, 6);
    const auto m2 = train_eigen_image(imgs, labels(6), 3);
    save_model(dir / "m2", m2);
    const auto r2 = load_model(dir / "m2");
    check_same(m2, r2);
    CHECK(std::get<EigenBasis2D>(r2.basis()).basis == std::get<EigenBasis2D>(m2.basis()).basis);
    CHECK(classify(r2.extract(imgs[3]), r2).index == 3);

    const auto mp = train_pca_image(imgs, labels(6), 0.9);
    save_model(dir / "mp", mp);
    check_same(mp, load_model(dir / "mp"));

    std::vector<Spectrum> spectra;
    std::mt19937_64 rng(4);
    for (int i = 0; i < 4; ++i) {
        const Eigen::MatrixXd v = random_matrix(rng, 512, 1, 0.0, 1.0);
        spectra.emplace_back(std::vector<double>(v.data(), v.data() + 512), 11.71875);
    }
    const auto mf = train_fft_amplitude(spectra, labels(4), 0.9);
    save_model(dir / "mf", mf);
    const auto rf = load_model(dir / "mf");
    check_same(mf, rf);
    CHECK(std::get<PcaBasis>(rf.basis()).components == std::get<PcaBasis>(mf.basis()).components);
}

TEST_CASE("corrupt model files are data errors")
{
    const auto dir = testing::scratch_dir("model_bad");
    const auto m = train_eigen_image(images(5, 4), labels(4), 2);
    save_model(dir / "m", m);

    std::ifstream in(dir / "m", std::ios::binary);
    const std::string bytes(std::istreambuf_iterator<char>(in), {});

    std::ofstream(dir / "trunc", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
    CHECK_THROWS_AS(load_model(dir / "trunc"), DataError);

    std::string wrong = bytes;
    wrong[0] = 'X';
    std::ofstream(dir / "magic", std::ios::binary) << wrong;
    CHECK_THROWS_AS(load_model(dir / "magic"), DataError);

    std::string version = bytes;
    version[8] = 9;
    std::ofstream(dir / "version", std::ios::binary) << version;
    CHECK_THROWS_AS(load_model(dir / "version"), DataError);

    CHECK_THROWS_AS(load_model(dir / "absent"), IoError);
    CHECK_THROWS_AS(save_model(dir / "no" / "such" / "dir" / "m", m), IoError);
}
