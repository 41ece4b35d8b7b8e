#pragma once

#include "specfault/pca.hpp"
#include "specfault/twodpca.hpp"
#include "specfault/vibration.hpp"

#include <Eigen/Core>

#include <string_view>
#include <variant>
#include <vector>

namespace specfault {

enum class FeatureKind : std::uint8_t { EigenImage = 0, PcaVector = 1, FftAmplitude = 2 };

std::string_view to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view text);

/// Sum over columns of the per-column Euclidean norm of (a - b).
/// Vectors are single-column matrices, so this reduces to the plain
/// Euclidean distance for PCA features.
double distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct Classification {
    FaultType label = FaultType::NO;
    std::size_t index = 0;
    double distance = 0.0;
};

/// The fitted basis (2DPCA or PCA), the projected training features and
/// their labels. Immutable once built.
class TrainedModel {
public:
    using Basis = std::variant<EigenBasis2D, PcaBasis>;

    TrainedModel(FeatureKind kind, Basis basis, std::vector<Eigen::MatrixXd> features,
                 std::vector<FaultClass> labels);

    FeatureKind kind() const { return kind_; }
    const Basis& basis() const { return basis_; }
    const std::vector<Eigen::MatrixXd>& features() const { return features_; }
    const std::vector<FaultClass>& labels() const { return labels_; }
    std::size_t size() const { return features_.size(); }

    /// Maps a raw input (image matrix for image kinds, normalized amplitude
    /// column for FFT) into this model's feature space.
    Eigen::MatrixXd extract(const ImageMatrix& image) const;
    Eigen::MatrixXd extract(const Spectrum& spectrum) const;
    Eigen::MatrixXd extract(const PackedImage& image) const;

private:
    FeatureKind kind_;
    Basis basis_;
    std::vector<Eigen::MatrixXd> features_;
    std::vector<FaultClass> labels_;
};

/// Nearest training feature; ties go to the lowest index.
Classification classify(const Eigen::MatrixXd& feature, const TrainedModel& model);

/// Same argmin, abandoning a candidate once its partial column sum exceeds
/// the best distance so far.
Classification classify_pruned(const Eigen::MatrixXd& feature, const TrainedModel& model);

/// Fits the basis of `kind` on the given training data and projects it.
/// `images` is used for the image kinds, `spectra` for FftAmplitude.
TrainedModel train_eigen_image(std::span<const ImageMatrix> images, std::vector<FaultClass> labels,
                               Eigen::Index d);
TrainedModel train_pca_image(std::span<const ImageMatrix> images, std::vector<FaultClass> labels,
                             double contribution);
TrainedModel train_fft_amplitude(std::span<const Spectrum> spectra, std::vector<FaultClass> labels,
                                 double contribution);

} // namespace specfault
