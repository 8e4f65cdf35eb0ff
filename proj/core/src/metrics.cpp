#include "pcgan/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace pcgan {

std::vector<double> ColorStatBackend::features(const std::vector<Image>& images) const {
  std::vector<double> out;
  out.reserve(images.size() * feature_dim());
  for (const Image& img : images) {
    const size_t plane = static_cast<size_t>(img.h) * img.w;
    for (int ch = 0; ch < 3; ++ch) {
      double mean = 0, top = 0, left = 0;
      for (int r = 0; r < img.h; ++r)
        for (int c = 0; c < img.w; ++c) {
          const double v = img.at(ch, r, c);
          mean += v;
          if (r < img.h / 2) top += v;
          if (c < img.w / 2) left += v;
        }
      mean /= plane;
      double var = 0;
      for (int r = 0; r < img.h; ++r)
        for (int c = 0; c < img.w; ++c) {
          const double d = img.at(ch, r, c) - mean;
          var += d * d;
        }
      out.push_back(mean);
      out.push_back(std::sqrt(var / plane));
      out.push_back(top / (plane / 2.0));
      out.push_back(left / (plane / 2.0));
    }
  }
  return out;
}

std::vector<double> ColorStatBackend::predict(const std::vector<Image>& images) const {
  const std::vector<double> feats = features(images);
  const int d = feature_dim();
  const int c = num_classes();
  std::vector<double> probs;
  probs.reserve(images.size() * c);
  for (size_t i = 0; i < images.size(); ++i) {
    std::vector<double> logits(c, 0.0);
    for (int k = 0; k < c; ++k)
      for (int j = 0; j < d; ++j)
        logits[k] += 3.0 * std::sin(0.7 * (k + 1) * (j + 1)) * feats[i * d + j];
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0;
    for (double& l : logits) {
      l = std::exp(l - mx);
      sum += l;
    }
    for (double l : logits) probs.push_back(l / sum);
  }
  return probs;
}

std::pair<double, double> inception_score(const std::vector<double>& probs, int num_classes,
                                          int splits) {
  require(num_classes > 0 && splits > 0, "inception_score: bad arguments");
  require(probs.size() % num_classes == 0, "inception_score: ragged probability rows");
  const int n = static_cast<int>(probs.size()) / num_classes;
  require(n >= splits, "inception_score: fewer samples than splits");
  for (int i = 0; i < n; ++i) {
    double sum = 0;
    for (int k = 0; k < num_classes; ++k) {
      const double p = probs[static_cast<size_t>(i) * num_classes + k];
      require(p >= 0.0, "inception_score: negative probability");
      sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-6, "inception_score: row does not sum to 1");
  }

  std::vector<double> scores;
  for (int s = 0; s < splits; ++s) {
    const int begin = static_cast<int>(static_cast<long>(s) * n / splits);
    const int end = static_cast<int>(static_cast<long>(s + 1) * n / splits);
    std::vector<double> marginal(num_classes, 0.0);
    for (int i = begin; i < end; ++i)
      for (int k = 0; k < num_classes; ++k)
        marginal[k] += probs[static_cast<size_t>(i) * num_classes + k] / (end - begin);
    double mean_kl = 0;
    for (int i = begin; i < end; ++i) {
      double kl = 0;
      for (int k = 0; k < num_classes; ++k) {
        const double p = probs[static_cast<size_t>(i) * num_classes + k];
        if (p > 0) kl += p * std::log(p / marginal[k]);
      }
      mean_kl += kl / (end - begin);
    }
    scores.push_back(std::exp(mean_kl));
  }
  double mean = 0;
  for (double s : scores) mean += s / splits;
  double var = 0;
  for (double s : scores) var += (s - mean) * (s - mean) / splits;
  return {mean, std::sqrt(var)};
}

std::pair<double, double> mask_inception_score(const std::vector<Image>& images,
                                               const std::vector<Grid>& masks,
                                               const ClassifierBackend& backend, int splits) {
  require(images.size() == masks.size(), "mask_inception_score: images/masks mismatch");
  std::vector<Image> masked;
  masked.reserve(images.size());
  for (size_t i = 0; i < images.size(); ++i) {
    require(images[i].h == masks[i].h && images[i].w == masks[i].w,
            "mask_inception_score: mask shape mismatch");
    Image m(images[i].h, images[i].w);
    for (int ch = 0; ch < 3; ++ch)
      for (int r = 0; r < m.h; ++r)
        for (int c = 0; c < m.w; ++c)
          m.at(ch, r, c) = images[i].at(ch, r, c) * masks[i].at(r, c);
    masked.push_back(std::move(m));
  }
  return inception_score(backend.predict(masked), backend.num_classes(), splits);
}

namespace {

// Trace of the principal square root of a symmetric PSD matrix; eigenvalues
// below -1e-8 are rejected, small negatives clipped to 0.
double trace_sqrt_psd(const Eigen::MatrixXd& s, Eigen::MatrixXd* sqrt_out = nullptr) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (s + s.transpose()));
  Eigen::VectorXd vals = eig.eigenvalues();
  double tr = 0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    require(vals(i) >= -1e-8, "frechet_distance: covariance square root not PSD");
    vals(i) = std::sqrt(std::max(0.0, vals(i)));
    tr += vals(i);
  }
  if (sqrt_out)
    *sqrt_out = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  return tr;
}

}  // namespace

double frechet_distance(const std::vector<double>& feats_a, int n_a,
                        const std::vector<double>& feats_b, int n_b, int dim) {
  require(dim >= 1 && n_a >= 2 && n_b >= 2, "frechet_distance: need >=2 rows and dim >= 1");
  require(feats_a.size() == static_cast<size_t>(n_a) * dim &&
              feats_b.size() == static_cast<size_t>(n_b) * dim,
          "frechet_distance: feature size mismatch");
  for (double v : feats_a) require(std::isfinite(v), "frechet_distance: non-finite feature");
  for (double v : feats_b) require(std::isfinite(v), "frechet_distance: non-finite feature");

  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> a(feats_a.data(), n_a, dim);
  Eigen::Map<const RowMat> b(feats_b.data(), n_b, dim);

  const Eigen::VectorXd mu_a = a.colwise().mean();
  const Eigen::VectorXd mu_b = b.colwise().mean();
  const Eigen::MatrixXd ca = a.rowwise() - mu_a.transpose();
  const Eigen::MatrixXd cb = b.rowwise() - mu_b.transpose();
  const Eigen::MatrixXd sigma_a = ca.transpose() * ca / (n_a - 1);
  const Eigen::MatrixXd sigma_b = cb.transpose() * cb / (n_b - 1);

  Eigen::MatrixXd sqrt_a;
  trace_sqrt_psd(sigma_a, &sqrt_a);
  const double tr_cross = trace_sqrt_psd(sqrt_a * sigma_b * sqrt_a);

  return (mu_a - mu_b).squaredNorm() + sigma_a.trace() + sigma_b.trace() - 2.0 * tr_cross;
}

}  // namespace pcgan
