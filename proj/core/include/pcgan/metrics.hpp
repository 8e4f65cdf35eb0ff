#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pcgan/grid.hpp"

namespace pcgan {

/// Pluggable feature/classifier backend for IS / mask-IS / FID.
class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  virtual std::string name() const = 0;
  virtual int num_classes() const = 0;
  virtual int feature_dim() const = 0;
  /// N x num_classes probability rows, row-major; each row sums to 1.
  virtual std::vector<double> predict(const std::vector<Image>& images) const = 0;
  /// N x feature_dim feature rows, row-major.
  virtual std::vector<double> features(const std::vector<Image>& images) const = 0;
  /// Whether batched prediction may run from several threads at once.
  virtual bool reentrant() const { return true; }
};

/// Deterministic backend built from per-channel color statistics; lets the
/// whole metrics path run hermetically without a pretrained network.
class ColorStatBackend : public ClassifierBackend {
 public:
  std::string name() const override { return "color-stat"; }
  int num_classes() const override { return 8; }
  int feature_dim() const override { return 12; }
  std::vector<double> predict(const std::vector<Image>& images) const override;
  std::vector<double> features(const std::vector<Image>& images) const override;
};

/// exp(mean KL(p(y|x) || p(y))) per split; returns (mean, std) over splits.
/// Split membership is by deterministic order.
std::pair<double, double> inception_score(const std::vector<double>& probs, int num_classes,
                                          int splits);

/// Inception score of foreground-masked images (background zeroed).
std::pair<double, double> mask_inception_score(const std::vector<Image>& images,
                                               const std::vector<Grid>& masks,
                                               const ClassifierBackend& backend, int splits);

/// |mu_a - mu_b|^2 + Tr(Sa + Sb - 2 (Sa Sb)^{1/2}), square root via the
/// symmetric form Sa^{1/2} Sb Sa^{1/2}. Covariances are unbiased (N-1).
double frechet_distance(const std::vector<double>& feats_a, int n_a,
                        const std::vector<double>& feats_b, int n_b, int dim);

struct MetricReport {
  std::string metric;
  double value = 0;
  double std_dev = 0;
  int n = 0;
  std::string backend;
  std::string config_hash;
};

}  // namespace pcgan
