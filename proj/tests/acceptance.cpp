// One PASS/FAIL line per acceptance criterion; exits nonzero if any gating
// criterion fails.
#include "specfault/classifier.hpp"
#include "specfault/experiment.hpp"
#include "specfault/twodpca.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace specfault;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int failures = 0;

void verdict(bool ok, int id, const std::string& name, const std::string& detail, bool gating = true)
{
    std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok && gating)
        ++failures;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Eigenvalue oracle: Householder reduction to tridiagonal form, then Sturm
// sequence counts of the characteristic polynomial bisected to machine
// precision. Shares no code with the library solver.
std::vector<double> oracle_eigenvalues(std::vector<std::vector<double>> a)
{
    const int n = static_cast<int>(a.size());
    for (int k = 0; k + 2 < n; ++k) {
        double alpha = 0.0;
        for (int i = k + 1; i < n; ++i)
            alpha += a[i][k] * a[i][k];
        alpha = std::sqrt(alpha);
        if (alpha == 0.0)
            continue;
        if (a[k + 1][k] > 0)
            alpha = -alpha;
        std::vector<double> v(n, 0.0);
        v[k + 1] = a[k + 1][k] - alpha;
        for (int i = k + 2; i < n; ++i)
            v[i] = a[i][k];
        double vv = 0.0;
        for (double x : v)
            vv += x * x;
        if (vv == 0.0)
            continue;
        // A <- H A H with H = I - 2 v v^T / v^T v.
        std::vector<double> p(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                p[i] += a[i][j] * v[j];
        for (double& x : p)
            x *= 2.0 / vv;
        double vp = 0.0;
        for (int i = 0; i < n; ++i)
            vp += v[i] * p[i];
        const double c = vp / vv;
        for (int i = 0; i < n; ++i)
            p[i] -= c * v[i];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a[i][j] -= v[i] * p[j] + p[i] * v[j];
    }
    std::vector<double> d(n), e(n, 0.0);
    for (int i = 0; i < n; ++i)
        d[i] = a[i][i];
    for (int i = 1; i < n; ++i)
        e[i] = a[i][i - 1];

    // Number of eigenvalues strictly below x.
    auto count_below = [&](double x) {
        int count = 0;
        double q = 1.0;
        for (int i = 0; i < n; ++i) {
            q = d[i] - x - (i > 0 ? e[i] * e[i] / q : 0.0);
            if (q == 0.0)
                q = -1e-300;
            if (q < 0)
                ++count;
        }
        return count;
    };
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = std::abs(e[i]) + (i + 1 < n ? std::abs(e[i + 1]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    std::vector<double> values(n);
    for (int k = 0; k < n; ++k) {
        double a0 = lo - 1.0, b0 = hi + 1.0;
        for (int it = 0; it < 200 && b0 - a0 > 1e-15 * std::max(1.0, std::abs(a0) + std::abs(b0)); ++it) {
            const double mid = 0.5 * (a0 + b0);
            if (count_below(mid) > n - 1 - k)
                b0 = mid;
            else
                a0 = mid;
        }
        values[k] = 0.5 * (a0 + b0); // k-th largest
    }
    return values;
}

void criterion_eigen()
{
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> size(1, 12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_value = 0.0, worst_residual = 0.0;
    double solver_seconds = 0.0;
    const auto start = Clock::now();
    for (int trial = 0; trial < 200; ++trial) {
        const int h = size(rng);
        Eigen::MatrixXd g(h, h);
        for (int i = 0; i < h; ++i)
            for (int j = 0; j <= i; ++j)
                g(i, j) = g(j, i) = u(rng);
        if (trial % 4 == 0)
            g = g * g.transpose(); // PSD, like a scatter matrix
        const auto t = Clock::now();
        const SymmetricEigen e = eigen_sorted(g);
        solver_seconds += seconds_since(t);
        std::vector<std::vector<double>> rows(h, std::vector<double>(h));
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < h; ++j)
                rows[i][j] = g(i, j);
        const auto ref = oracle_eigenvalues(rows);
        for (int k = 0; k < h; ++k) {
            worst_value = std::max(worst_value, std::abs(e.values(k) - ref[k]));
            worst_residual =
                std::max(worst_residual, (g * e.vectors.col(k) - e.values(k) * e.vectors.col(k)).norm());
        }
    }
    const double total = seconds_since(start);
    verdict(worst_value <= 1e-7 && worst_residual <= 1e-8 && total < 10.0, 1, "eigen oracle",
            fmt("max |dlambda| %.2e, max residual %.2e, %.3f s total (%.3f s solver)", worst_value, worst_residual,
                total, solver_seconds));
}

void criterion_scatter()
{
    std::mt19937_64 rng(202);
    std::uniform_int_distribution<int> dim(1, 8), count(1, 10);
    std::uniform_real_distribution<double> u(0.0, 255.0);
    double worst = 0.0, worst_trace = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int rows = dim(rng), cols = dim(rng), m = count(rng);
        std::vector<ImageMatrix> images;
        for (int j = 0; j < m; ++j) {
            ImageMatrix a(rows, cols);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                    a(r, c) = u(rng);
            images.push_back(a);
        }
        const Eigen::MatrixXd g = scatter_matrix(images);

        std::vector<std::vector<double>> mean(rows, std::vector<double>(cols, 0.0));
        for (const auto& a : images)
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                    mean[r][c] += a(r, c) / m;
        double frob = 0.0;
        for (int p = 0; p < cols; ++p) {
            for (int q = 0; q < cols; ++q) {
                double s = 0.0;
                for (const auto& a : images)
                    for (int r = 0; r < rows; ++r)
                        s += (a(r, p) - mean[r][p]) * (a(r, q) - mean[r][q]);
                s /= m;
                worst = std::max(worst, std::abs(g(p, q) - s) / std::max(1.0, std::abs(s)));
            }
        }
        for (const auto& a : images)
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                    frob += (a(r, c) - mean[r][c]) * (a(r, c) - mean[r][c]) / m;
        if (frob > 0)
            worst_trace = std::max(worst_trace, std::abs(g.trace() - frob) / frob);
        else
            worst_trace = std::max(worst_trace, std::abs(g.trace()));
    }
    verdict(worst <= 1e-12 && worst_trace <= 1e-8, 2, "scatter matrix",
            fmt("max entry error %.2e (scaled by max(1,|G|)), max trace error %.2e relative", worst, worst_trace));
}

void criterion_distance()
{
    Eigen::MatrixXd a(2, 2), b = Eigen::MatrixXd::Zero(2, 2);
    a << 1, 0, 0, 2;
    const double d = distance(a, b);
    verdict(d == 3.0, 3, "column-sum distance", fmt("d = %.17g (Frobenius would be %.6f)", d, std::sqrt(5.0)));
}

void criterion_self_recall(const Corpus& corpus)
{
    const auto group_idx = [&] {
        std::vector<std::size_t> idx;
        for (FaultType t : {FaultType::IF, FaultType::BF, FaultType::OF, FaultType::NO})
            for (std::size_t i : corpus.group(t, 0))
                idx.push_back(i);
        return idx;
    }();
    std::vector<ImageMatrix> images(group_idx.size());
    std::vector<Spectrum> spectra;
    std::vector<FaultClass> labels;
    for (std::size_t k = 0; k < group_idx.size(); ++k) {
        corpus[group_idx[k]].image.unpack_into(images[k]);
        spectra.push_back(corpus[group_idx[k]].spectrum);
        labels.push_back(corpus[group_idx[k]].label);
    }
    std::string detail;
    bool ok = true;
    for (FeatureKind kind : {FeatureKind::EigenImage, FeatureKind::PcaVector, FeatureKind::FftAmplitude}) {
        const TrainedModel model = kind == FeatureKind::EigenImage  ? train_eigen_image(images, labels, 10)
                                   : kind == FeatureKind::PcaVector ? train_pca_image(images, labels, 0.90)
                                                                    : train_fft_amplitude(spectra, labels, 0.90);
        std::size_t hits = 0;
        double worst = 0.0;
        for (std::size_t k = 0; k < images.size(); ++k) {
            const Eigen::MatrixXd f = kind == FeatureKind::FftAmplitude ? model.extract(spectra[k])
                                                                         : model.extract(images[k]);
            const Classification c = classify(f, model);
            hits += c.label == labels[k].type() ? 1 : 0;
            worst = std::max(worst, c.distance);
        }
        ok = ok && hits == images.size() && worst == 0.0;
        detail += fmt("%s %zu/%zu max distance %g; ", std::string(to_string(kind)).c_str(), hits, images.size(), worst);
    }
    detail.resize(detail.size() - 2);
    verdict(ok, 4, "self-recall", detail);
}

struct KindResult {
    double same = 0.0;
    double cross = 0.0;
    double seconds = 0.0;
};

KindResult summarize(const std::vector<ReportEntry>& entries)
{
    KindResult r;
    int cross = 0;
    for (const auto& e : entries) {
        if (e.testing_load == 0) {
            r.same = e.mean_rate_pct;
        } else {
            r.cross += e.mean_rate_pct;
            ++cross;
        }
        r.seconds = e.seconds;
    }
    r.cross /= cross;
    return r;
}

void criteria_synthetic()
{
    ExperimentConfig c;
    apply_test_id(c, 1);
    const auto start = Clock::now();
    const Corpus corpus = build_corpus(c);
    const double corpus_seconds = seconds_since(start);

    criterion_self_recall(corpus);

    // 5: the 2DPCA run on its own, corpus included.
    c.feature_kind = FeatureKind::EigenImage;
    const auto t5 = Clock::now();
    const KindResult eig = summarize(run_test(corpus, c));
    const double run_seconds = corpus_seconds + seconds_since(t5);
    verdict(eig.same >= 99.0 && eig.cross >= 90.0 && run_seconds < 300.0, 5, "synthetic end-to-end",
            fmt("2dpca same-load %.2f%%, cross-load mean %.2f%%, %.1f s (corpus %.1f s)", eig.same, eig.cross,
                run_seconds, corpus_seconds));

    // 6: same corpus and splits for the other two kinds.
    c.feature_kind = FeatureKind::PcaVector;
    const KindResult pca = summarize(run_test(corpus, c));
    c.feature_kind = FeatureKind::FftAmplitude;
    const KindResult fft = summarize(run_test(corpus, c));
    verdict(eig.cross >= pca.cross && pca.cross >= fft.cross, 6, "feature-kind ordering",
            fmt("cross-load 2dpca %.2f%% >= pca %.2f%% >= fft %.2f%% (same-load %.2f/%.2f/%.2f)", eig.cross,
                pca.cross, fft.cross, eig.same, pca.same, fft.same));

    // 7: n = 10 wall clock on the same corpus.
    c.n_per_class = 10;
    c.feature_kind = FeatureKind::EigenImage;
    const auto t2 = Clock::now();
    run_test(corpus, c);
    const double eig_seconds = seconds_since(t2);
    c.feature_kind = FeatureKind::PcaVector;
    const auto tp = Clock::now();
    run_test(corpus, c);
    const double pca_seconds = seconds_since(tp);
    verdict(eig_seconds <= 1.1 * pca_seconds, 7, "timing direction",
            fmt("n=10: 2dpca %.1f s, pca %.1f s, ratio %.2f", eig_seconds, pca_seconds, eig_seconds / pca_seconds));
}

std::string suite_csv()
{
    SuiteConfig s;
    s.base.record_timing = false;
    s.tests = {1, 2, 3, 4, 5, 6, 7, 8};
    s.kinds = {FeatureKind::EigenImage, FeatureKind::PcaVector, FeatureKind::FftAmplitude};
    s.n_values = {1, 3, 5, 10};
    std::ostringstream out;
    emit_report(out, run_suite(s), ReportFormat::Csv);
    return out.str();
}

void criterion_determinism()
{
    const auto start = Clock::now();
    const std::string a = suite_csv();
    const std::string b = suite_csv();
    const auto lines = std::count(a.begin(), a.end(), '\n');
    verdict(a == b && lines == 1 + 8 * 3 * 4 * 4, 8, "determinism",
            fmt("%ld CSV lines, %zu bytes, identical: %s, %.1f s for two runs", static_cast<long>(lines), a.size(),
                a == b ? "yes" : "no", seconds_since(start)));
}

void criterion_external()
{
    const char* manifest = std::getenv("SPECFAULT_EXTERNAL_MANIFEST");
    if (!manifest || !*manifest) {
        std::printf("SKIP 9 external recordings: set SPECFAULT_EXTERNAL_MANIFEST to a recordings manifest to run\n");
        return;
    }
    try {
        ExperimentConfig c;
        c.source = DataSource::Ingested;
        c.manifest = manifest;
        c.n_per_class = 10;
        apply_test_id(c, 1);
        const auto entries = run_test(build_corpus(c), c);
        bool ok = true;
        std::string detail;
        for (const auto& e : entries) {
            ok = ok && e.mean_rate_pct >= 95.0;
            detail += fmt("load%d %.2f%% ", e.testing_load, e.mean_rate_pct);
        }
        verdict(ok, 9, "external recordings (not gating)", detail, false);
    } catch (const std::exception& e) {
        verdict(false, 9, "external recordings (not gating)", e.what(), false);
    }
}

} // namespace

int main(int argc, char** argv)
{
    // --quick skips the two full-suite runs; ctest always runs everything.
    const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
    try {
        criterion_eigen();
        criterion_scatter();
        criterion_distance();
        criteria_synthetic();
        if (quick)
            std::printf("SKIP 8 determinism: --quick\n");
        else
            criterion_determinism();
        criterion_external();
    } catch (const std::exception& e) {
        std::printf("FAIL acceptance aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%s: %d gating failure(s)\n", failures == 0 ? "ALL PASS" : "FAILED", failures);
    return failures == 0 ? 0 : 1;
}
