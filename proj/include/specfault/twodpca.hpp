#pragma once

#include "specfault/spectrum.hpp"

#include <Eigen/Core>

#include <span>

namespace specfault {

/// Eigenpairs of a symmetric matrix, eigenvalues in non-increasing order and
/// each eigenvector (column) scaled so its first nonzero entry is positive.
struct SymmetricEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

/// Fitted right-projection basis.
struct EigenBasis2D {
    ImageMatrix mean_image;      // rows x cols
    Eigen::VectorXd eigenvalues; // all cols eigenvalues, descending
    Eigen::MatrixXd basis;       // cols x d

    Eigen::Index rows() const { return mean_image.rows(); }
    Eigen::Index cols() const { return mean_image.cols(); }
    Eigen::Index d() const { return basis.cols(); }
};

/// Projected feature matrix E = [B u_1, ..., B u_d], rows x d.
struct EigenImage {
    Eigen::MatrixXd features;
};

ImageMatrix mean_image(std::span<const ImageMatrix> samples);

/// G = (1/M) sum_j (A_j - mean)^T (A_j - mean), cols x cols, exactly symmetric.
Eigen::MatrixXd scatter_matrix(std::span<const ImageMatrix> samples);

/// Full symmetric eigendecomposition. Rejects non-finite input and matrices
/// whose asymmetry exceeds 1e-10 (relative to max(1, max|G|)).
SymmetricEigen eigen_sorted(const Eigen::MatrixXd& g);

/// Mean image, scatter matrix and its d leading eigenvectors; requires 1 <= d < cols.
EigenBasis2D fit_2dpca(std::span<const ImageMatrix> samples, Eigen::Index d);

/// Right-multiplies the raw image by the basis (the mean is not subtracted).
EigenImage project(const ImageMatrix& image, const EigenBasis2D& basis);

} // namespace specfault
