#include "specfault/pca.hpp"

#include "specfault/error.hpp"
#include "specfault/twodpca.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace specfault {

namespace {

double rank_tolerance(const Eigen::VectorXd& eigenvalues, Eigen::Index m, Eigen::Index p)
{
    if (eigenvalues.size() == 0)
        return 0.0;
    const double top = std::max(0.0, eigenvalues(0));
    return static_cast<double>(std::max(m, p)) * std::numeric_limits<double>::epsilon() * top;
}

} // namespace

Eigen::VectorXd flatten(const ImageMatrix& image)
{
    Eigen::VectorXd v(image.size());
    Eigen::Index i = 0;
    for (Eigen::Index r = 0; r < image.rows(); ++r)
        for (Eigen::Index c = 0; c < image.cols(); ++c)
            v(i++) = image(r, c);
    return v;
}

Eigen::VectorXd flatten(const PackedImage& image)
{
    const auto levels = image.levels();
    Eigen::VectorXd v(static_cast<Eigen::Index>(levels.size()));
    for (std::size_t i = 0; i < levels.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = levels[i] / 255.0;
    return v;
}

ImageMatrix unflatten(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols)
{
    if (rows * cols != v.size())
        throw InvalidArgument("vector length does not match image dimensions");
    ImageMatrix image(rows, cols);
    Eigen::Index i = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            image(r, c) = v(i++);
    return image;
}

Eigen::Index select_dimension(const Eigen::VectorXd& eigenvalues, double contribution)
{
    if (!(contribution > 0.0 && contribution <= 1.0))
        throw InvalidArgument("contribution must lie in (0, 1]");
    const double tol = rank_tolerance(eigenvalues, eigenvalues.size(), eigenvalues.size());
    double total = 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < eigenvalues.size() && eigenvalues(i) > tol; ++i) {
        total += eigenvalues(i);
        ++rank;
    }
    if (rank == 0)
        return 0;
    // Relative slack so that contribution = 1 stops at the numerical rank.
    const double target = contribution * total * (1.0 - 1e-12);
    double cum = 0.0;
    for (Eigen::Index k = 0; k < rank; ++k) {
        cum += eigenvalues(k);
        if (cum >= target)
            return k + 1;
    }
    return rank;
}

PcaBasis fit_pca(const Eigen::MatrixXd& samples, double contribution)
{
    const Eigen::Index m = samples.rows();
    const Eigen::Index p = samples.cols();
    if (m < 2)
        throw InvalidArgument("PCA needs at least 2 samples, got " + std::to_string(m));
    if (p < 1)
        throw InvalidArgument("PCA samples must not be empty");
    if (!(contribution > 0.0 && contribution <= 1.0))
        throw InvalidArgument("contribution must lie in (0, 1]");
    if (!samples.allFinite())
        throw DataError("PCA samples contain non-finite values");

    PcaBasis basis;
    basis.contribution = contribution;
    basis.mean = samples.colwise().mean().transpose();
    const Eigen::MatrixXd centered = samples.rowwise() - basis.mean.transpose();
    const double inv_m = 1.0 / static_cast<double>(m);

    Eigen::MatrixXd vectors;
    if (p > m) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(centered, inv_m);
        gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
        SymmetricEigen eig = eigen_sorted(gram);
        basis.eigenvalues = std::move(eig.values);
        vectors = std::move(eig.vectors);
    } else {
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
        cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), inv_m);
        cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
        SymmetricEigen eig = eigen_sorted(cov);
        basis.eigenvalues = std::move(eig.values);
        vectors = std::move(eig.vectors);
    }

    const Eigen::Index k = select_dimension(basis.eigenvalues, contribution);
    if (k == 0) {
        basis.components = Eigen::MatrixXd::Zero(p, 1);
        basis.components(0, 0) = 1.0;
        return basis;
    }

    if (p > m) {
        // Map Gram eigenvectors v to covariance eigenvectors X^T v / sqrt(M lambda).
        basis.components.noalias() = centered.transpose() * vectors.leftCols(k);
        for (Eigen::Index i = 0; i < k; ++i)
            basis.components.col(i).normalize();
    } else {
        basis.components = vectors.leftCols(k);
    }
    return basis;
}

Eigen::VectorXd project_pca(const Eigen::VectorXd& x, const PcaBasis& basis)
{
    if (x.size() != basis.mean.size()) {
        throw InvalidArgument("feature vector has length " + std::to_string(x.size()) + ", basis expects " +
                              std::to_string(basis.mean.size()));
    }
    return basis.components.transpose() * (x - basis.mean);
}

Eigen::VectorXd normalized_amplitudes(const Spectrum& spectrum)
{
    const auto mags = spectrum.magnitudes();
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(mags.data(), static_cast<Eigen::Index>(mags.size()));
    const double peak = spectrum.max();
    if (peak > 0.0)
        v /= peak;
    return v;
}

} // namespace specfault
