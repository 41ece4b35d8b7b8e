#include "specfault/classifier.hpp"

#include "specfault/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace specfault {

std::string_view to_string(FeatureKind kind)
{
    switch (kind) {
    case FeatureKind::EigenImage: return "2dpca";
    case FeatureKind::PcaVector: return "pca";
    case FeatureKind::FftAmplitude: return "fft";
    }
    return "?";
}

FeatureKind parse_feature_kind(std::string_view text)
{
    if (text == "2dpca" || text == "eigen-image") return FeatureKind::EigenImage;
    if (text == "pca" || text == "pca-vector") return FeatureKind::PcaVector;
    if (text == "fft" || text == "fft-amplitude") return FeatureKind::FftAmplitude;
    throw InvalidArgument("unknown feature kind '" + std::string(text) + "' (2dpca, pca, fft)");
}

double distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidArgument("feature shapes differ: " + std::to_string(a.rows()) + "x" +
                              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                              std::to_string(b.cols()));
    }
    double sum = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c)
        sum += (a.col(c) - b.col(c)).norm();
    return sum;
}

TrainedModel::TrainedModel(FeatureKind kind, Basis basis, std::vector<Eigen::MatrixXd> features,
                           std::vector<FaultClass> labels)
    : kind_(kind), basis_(std::move(basis)), features_(std::move(features)), labels_(std::move(labels))
{
    if (features_.empty())
        throw InvalidArgument("a trained model needs at least one training feature");
    if (features_.size() != labels_.size())
        throw InvalidArgument("feature and label counts differ");
    const bool wants_2d = kind_ == FeatureKind::EigenImage;
    if (wants_2d != std::holds_alternative<EigenBasis2D>(basis_))
        throw InvalidArgument("basis type does not match feature kind");
    for (const auto& f : features_) {
        if (f.rows() != features_.front().rows() || f.cols() != features_.front().cols())
            throw InvalidArgument("training features must share one shape");
    }
}

Eigen::MatrixXd TrainedModel::extract(const ImageMatrix& image) const
{
    switch (kind_) {
    case FeatureKind::EigenImage: return project(image, std::get<EigenBasis2D>(basis_)).features;
    case FeatureKind::PcaVector: return project_pca(flatten(image), std::get<PcaBasis>(basis_));
    case FeatureKind::FftAmplitude: break;
    }
    throw InvalidArgument("an fft-amplitude model classifies spectra, not images");
}

Eigen::MatrixXd TrainedModel::extract(const PackedImage& image) const
{
    switch (kind_) {
    case FeatureKind::EigenImage: {
        ImageMatrix m;
        image.unpack_into(m);
        return project(m, std::get<EigenBasis2D>(basis_)).features;
    }
    case FeatureKind::PcaVector: return project_pca(flatten(image), std::get<PcaBasis>(basis_));
    case FeatureKind::FftAmplitude: break;
    }
    throw InvalidArgument("an fft-amplitude model classifies spectra, not images");
}

Eigen::MatrixXd TrainedModel::extract(const Spectrum& spectrum) const
{
    if (kind_ != FeatureKind::FftAmplitude)
        throw InvalidArgument("image models classify spectrum images, not raw spectra");
    return project_pca(normalized_amplitudes(spectrum), std::get<PcaBasis>(basis_));
}

Classification classify(const Eigen::MatrixXd& feature, const TrainedModel& model)
{
    const auto& train = model.features();
    Classification best{model.labels().front().type(), 0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < train.size(); ++i) {
        const double d = distance(train[i], feature);
        if (d < best.distance)
            best = {model.labels()[i].type(), i, d};
    }
    return best;
}

Classification classify_pruned(const Eigen::MatrixXd& feature, const TrainedModel& model)
{
    const auto& train = model.features();
    if (feature.rows() != train.front().rows() || feature.cols() != train.front().cols())
        throw InvalidArgument("feature shape does not match the model");
    Classification best{model.labels().front().type(), 0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < train.size(); ++i) {
        // Column terms are accumulated in the same order as distance(), so a
        // completed candidate has bit-identical value to the reference path.
        double sum = 0.0;
        bool abandoned = false;
        for (Eigen::Index c = 0; c < feature.cols(); ++c) {
            sum += (train[i].col(c) - feature.col(c)).norm();
            if (sum > best.distance) {
                abandoned = true;
                break;
            }
        }
        if (!abandoned && sum < best.distance)
            best = {model.labels()[i].type(), i, sum};
    }
    return best;
}

TrainedModel train_eigen_image(std::span<const ImageMatrix> images, std::vector<FaultClass> labels,
                               Eigen::Index d)
{
    EigenBasis2D basis = fit_2dpca(images, d);
    std::vector<Eigen::MatrixXd> features;
    features.reserve(images.size());
    for (const auto& img : images)
        features.push_back(project(img, basis).features);
    return TrainedModel(FeatureKind::EigenImage, std::move(basis), std::move(features), std::move(labels));
}

TrainedModel train_pca_image(std::span<const ImageMatrix> images, std::vector<FaultClass> labels,
                             double contribution)
{
    if (images.empty())
        throw InvalidArgument("at least one training image is required");
    Eigen::MatrixXd x(static_cast<Eigen::Index>(images.size()), images.front().size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].rows() != images.front().rows() || images[i].cols() != images.front().cols())
            throw InvalidArgument("training images must share one shape");
        x.row(static_cast<Eigen::Index>(i)) = flatten(images[i]).transpose();
    }
    PcaBasis basis = fit_pca(x, contribution);
    std::vector<Eigen::MatrixXd> features;
    features.reserve(images.size());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        features.emplace_back(project_pca(x.row(i).transpose(), basis));
    return TrainedModel(FeatureKind::PcaVector, std::move(basis), std::move(features), std::move(labels));
}

TrainedModel train_fft_amplitude(std::span<const Spectrum> spectra, std::vector<FaultClass> labels,
                                 double contribution)
{
    if (spectra.empty())
        throw InvalidArgument("at least one training spectrum is required");
    Eigen::MatrixXd x(static_cast<Eigen::Index>(spectra.size()), static_cast<Eigen::Index>(kSpectrumBins));
    for (std::size_t i = 0; i < spectra.size(); ++i)
        x.row(static_cast<Eigen::Index>(i)) = normalized_amplitudes(spectra[i]).transpose();
    PcaBasis basis = fit_pca(x, contribution);
    std::vector<Eigen::MatrixXd> features;
    features.reserve(spectra.size());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        features.emplace_back(project_pca(x.row(i).transpose(), basis));
    return TrainedModel(FeatureKind::FftAmplitude, std::move(basis), std::move(features), std::move(labels));
}

} // namespace specfault
