#pragma once

#include "specfault/spectrum.hpp"

#include <Eigen/Core>

namespace specfault {

/// Vector-space PCA basis truncated by cumulative eigenvalue contribution.
struct PcaBasis {
    Eigen::VectorXd mean;        // length p
    Eigen::MatrixXd components;  // p x k, orthonormal columns
    Eigen::VectorXd eigenvalues; // descending, covariance normalized by 1/M
    double contribution = 0.9;

    Eigen::Index dim() const { return mean.size(); }
    Eigen::Index k() const { return components.cols(); }
};

/// Row-major concatenation of the pixels.
Eigen::VectorXd flatten(const ImageMatrix& image);
ImageMatrix unflatten(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols);
Eigen::VectorXd flatten(const PackedImage& image);

/// Fits PCA on the rows of `samples` (M x p, M >= 2). When p > M the
/// eigenpairs come from the M x M Gram matrix of the centered rows.
PcaBasis fit_pca(const Eigen::MatrixXd& samples, double contribution);

/// Smallest k whose leading eigenvalues reach `contribution` of the
/// (numerically nonzero) total; 0 when every eigenvalue is zero.
Eigen::Index select_dimension(const Eigen::VectorXd& eigenvalues, double contribution);

/// components^T (x - mean)
Eigen::VectorXd project_pca(const Eigen::VectorXd& x, const PcaBasis& basis);

/// Per-spectrum max normalisation used for the FFT-amplitude features.
Eigen::VectorXd normalized_amplitudes(const Spectrum& spectrum);

} // namespace specfault
