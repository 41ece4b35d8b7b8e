#include "specfault/twodpca.hpp"

#include "specfault/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace specfault {

namespace {

void check_same_shape(std::span<const ImageMatrix> samples)
{
    if (samples.empty())
        throw InvalidArgument("at least one training image is required");
    const auto rows = samples.front().rows();
    const auto cols = samples.front().cols();
    if (rows == 0 || cols == 0)
        throw InvalidArgument("training images must not be empty");
    for (std::size_t j = 1; j < samples.size(); ++j) {
        if (samples[j].rows() != rows || samples[j].cols() != cols) {
            throw InvalidArgument("image " + std::to_string(j) + " is " + std::to_string(samples[j].rows()) +
                                  "x" + std::to_string(samples[j].cols()) + ", expected " +
                                  std::to_string(rows) + "x" + std::to_string(cols));
        }
    }
}

ImageMatrix mean_of(std::span<const ImageMatrix> samples)
{
    ImageMatrix sum = ImageMatrix::Zero(samples.front().rows(), samples.front().cols());
    for (const auto& a : samples)
        sum += a;
    return sum / static_cast<double>(samples.size());
}

Eigen::MatrixXd scatter_about(std::span<const ImageMatrix> samples, const ImageMatrix& mean)
{
    const auto h = mean.cols();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(h, h);
    ImageMatrix dev;
    for (const auto& a : samples) {
        dev.noalias() = a - mean;
        g.selfadjointView<Eigen::Lower>().rankUpdate(dev.transpose());
    }
    g /= static_cast<double>(samples.size());
    g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
    return g;
}

} // namespace

ImageMatrix mean_image(std::span<const ImageMatrix> samples)
{
    check_same_shape(samples);
    return mean_of(samples);
}

Eigen::MatrixXd scatter_matrix(std::span<const ImageMatrix> samples)
{
    check_same_shape(samples);
    return scatter_about(samples, mean_of(samples));
}

SymmetricEigen eigen_sorted(const Eigen::MatrixXd& g)
{
    if (g.rows() != g.cols() || g.rows() == 0)
        throw InvalidArgument("eigen_sorted needs a non-empty square matrix");
    if (!g.allFinite())
        throw DataError("matrix has non-finite entries");
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw InvalidArgument("matrix is not symmetric");

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g);
    if (solver.info() != Eigen::Success)
        throw DataError("symmetric eigensolver did not converge");

    const Eigen::Index n = g.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto& values = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });

    SymmetricEigen out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values(k) = values(src);
        Eigen::VectorXd v = solver.eigenvectors().col(src).normalized();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(v(i)) > 1e-12) {
                if (v(i) < 0.0)
                    v = -v;
                break;
            }
        }
        out.vectors.col(k) = v;
    }
    return out;
}

EigenBasis2D fit_2dpca(std::span<const ImageMatrix> samples, Eigen::Index d)
{
    check_same_shape(samples);
    const auto h = samples.front().cols();
    if (d < 1 || d >= h) {
        throw InvalidArgument("projection dimension d must satisfy 1 <= d < " + std::to_string(h) +
                              ", got " + std::to_string(d));
    }
    EigenBasis2D basis;
    basis.mean_image = mean_of(samples);
    const Eigen::MatrixXd g = scatter_about(samples, basis.mean_image);
    SymmetricEigen eig = eigen_sorted(g);
    basis.eigenvalues = std::move(eig.values);
    basis.basis = eig.vectors.leftCols(d);
    return basis;
}

EigenImage project(const ImageMatrix& image, const EigenBasis2D& basis)
{
    if (image.cols() != basis.basis.rows()) {
        throw InvalidArgument("image has " + std::to_string(image.cols()) + " columns, basis expects " +
                              std::to_string(basis.basis.rows()));
    }
    EigenImage e;
    e.features.noalias() = image * basis.basis;
    return e;
}

} // namespace specfault
