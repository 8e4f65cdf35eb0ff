#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "pcgan/data.hpp"
#include "pcgan/wnet.hpp"

namespace pcgan {

struct TrainConfig {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  int epochs = 90;
  int iterations_per_epoch = 500;
  int d_steps_per_g_step = 2;
  double lambda1 = 1.0;
  double lambda2 = 0.01;
  int batch_size = 4;
  uint64_t seed = 0;
  double clamp_eps = 1e-7;
  double sigma = 6.0;
  bool squared_heatmaps = false;
  double masked_fill = 0.0;  // value written into split-out pixels, [-1,1] space

  void validate() const;
};

// ---- objective terms ------------------------------------------------------------
// Score maps are clamped into [eps, 1-eps] before logs, so every evaluation
// is finite.

double cgan_loss(const Tensor4& d1_real, const Tensor4& d1_fake, double eps = 1e-7);
double gan_loss(const Tensor4& d2_real, const Tensor4& d2_fake, double eps = 1e-7);
/// Mean absolute elementwise difference.
double l1_loss(const Tensor4& generated, const Tensor4& target);
double total_objective(double cgan, double gan, double l1, double lambda1, double lambda2);

/// d/ds of weight * mean(log clamp(s)); zero where the clamp saturates.
Tensor4 dmean_log(const Tensor4& scores, double eps, double weight);
/// d/ds of weight * mean(log(1 - clamp(s))).
Tensor4 dmean_log1m(const Tensor4& scores, double eps, double weight);
/// d/dgenerated of weight * l1_loss(generated, target).
Tensor4 l1_loss_grad(const Tensor4& generated, const Tensor4& target, double weight);

// ---- batches ---------------------------------------------------------------------

struct Batch {
  Tensor4 src_in, tgt_in;    // 21-channel encoder inputs
  Tensor4 src_img, tgt_img;  // 3-channel images
  Tensor4 src_heat, tgt_heat;
  std::vector<WarpContext> warps;
};

Tensor4 image_to_tensor(const Image& img);
Image tensor_to_image(const Tensor4& t, int sample);
Batch make_batch(const PairedDataset& ds, const std::vector<PairRecord>& chosen,
                 double masked_fill = 0.0);

/// Inputs and warp geometry for one pair of prepared samples.
Batch make_batch(const std::vector<const PreparedSample*>& src,
                 const std::vector<const PreparedSample*>& tgt, double masked_fill = 0.0);

// ---- model bundle and checkpoints ----------------------------------------------

struct ModelBundle {
  GeneratorSpec gspec;
  int d_base_channels = 64;
  std::unique_ptr<Generator> generator;
  std::unique_ptr<Discriminator> d1, d2;

  static ModelBundle create(const GeneratorSpec& gspec, int d_base_channels,
                            uint64_t init_seed);
};

/// Raw-double binary container: parameters keyed by module path, optimizer
/// state, epoch counter. Round-trips bitwise.
void save_checkpoint(const std::filesystem::path& path, ModelBundle& models, int epoch,
                     const Adam* opt_g = nullptr, const Adam* opt_d1 = nullptr,
                     const Adam* opt_d2 = nullptr);
/// Rebuilds the bundle from the header and fills parameters; returns the
/// stored epoch. Optimizer state is restored when the pointers are given.
int load_checkpoint(const std::filesystem::path& path, ModelBundle& models,
                    Adam* opt_g = nullptr, Adam* opt_d1 = nullptr, Adam* opt_d2 = nullptr);
/// Header-only peek (epoch + specs) without building tensors.
struct CheckpointInfo {
  GeneratorSpec gspec;
  int d_base_channels = 0;
  int epoch = 0;
};
CheckpointInfo read_checkpoint_info(const std::filesystem::path& path);

// ---- training loop -----------------------------------------------------------------

struct TrainResult {
  long d_update_events = 0;  // one event = one D step (updates both D1 and D2)
  long g_update_events = 0;
  std::vector<double> epoch_mean_l1;
  int last_epoch = 0;
};

/// Per iteration: d_steps_per_g_step discriminator steps, then one generator
/// step. Writes ckpt_epoch_<n> after every epoch and appends one loss-log
/// line per iteration to <out_dir>/loss_log.txt. Deterministic under a fixed
/// seed; per-epoch RNG reseeding makes epoch-boundary resume exact.
TrainResult train_loop(const TrainConfig& config, const PairedDataset& dataset,
                       ModelBundle& models, Adam& opt_g, Adam& opt_d1, Adam& opt_d2,
                       const std::filesystem::path& out_dir, int start_epoch = 0);

}  // namespace pcgan
