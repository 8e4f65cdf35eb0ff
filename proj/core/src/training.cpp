#include "pcgan/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "pcgan/partition.hpp"

namespace pcgan {

namespace fs = std::filesystem;

void TrainConfig::validate() const {
  require(lr > 0 && beta1 > 0 && beta2 > 0 && beta1 < 1 && beta2 < 1, "TrainConfig: bad Adam");
  require(epochs > 0 && iterations_per_epoch > 0 && d_steps_per_g_step > 0 && batch_size > 0,
          "TrainConfig: schedule values must be positive");
  require(lambda1 >= 0 && lambda2 >= 0, "TrainConfig: negative lambda");
  require(clamp_eps > 0 && clamp_eps < 0.5 && sigma > 0, "TrainConfig: bad eps/sigma");
}

// ---- objective terms ----------------------------------------------------------

namespace {
double clamp_score(double s, double eps) { return std::clamp(s, eps, 1.0 - eps); }

double mean_log(const Tensor4& s, double eps) {
  double acc = 0;
  for (double x : s.v) acc += std::log(clamp_score(x, eps));
  return acc / static_cast<double>(s.v.size());
}

double mean_log1m(const Tensor4& s, double eps) {
  double acc = 0;
  for (double x : s.v) acc += std::log(1.0 - clamp_score(x, eps));
  return acc / static_cast<double>(s.v.size());
}
}  // namespace

double cgan_loss(const Tensor4& d1_real, const Tensor4& d1_fake, double eps) {
  return mean_log(d1_real, eps) + mean_log1m(d1_fake, eps);
}

double gan_loss(const Tensor4& d2_real, const Tensor4& d2_fake, double eps) {
  return mean_log(d2_real, eps) + mean_log1m(d2_fake, eps);
}

double l1_loss(const Tensor4& generated, const Tensor4& target) {
  require(generated.same_shape(target), "l1_loss: shape mismatch");
  double acc = 0;
  for (size_t k = 0; k < generated.v.size(); ++k) acc += std::abs(generated.v[k] - target.v[k]);
  return acc / static_cast<double>(generated.v.size());
}

double total_objective(double cgan, double gan, double l1, double lambda1, double lambda2) {
  return cgan + lambda1 * gan + lambda2 * l1;
}

Tensor4 dmean_log(const Tensor4& scores, double eps, double weight) {
  Tensor4 g(scores.n, scores.c, scores.h, scores.w);
  const double scale = weight / static_cast<double>(scores.v.size());
  for (size_t k = 0; k < scores.v.size(); ++k) {
    const double s = scores.v[k];
    g.v[k] = (s > eps && s < 1.0 - eps) ? scale / s : 0.0;
  }
  return g;
}

Tensor4 dmean_log1m(const Tensor4& scores, double eps, double weight) {
  Tensor4 g(scores.n, scores.c, scores.h, scores.w);
  const double scale = weight / static_cast<double>(scores.v.size());
  for (size_t k = 0; k < scores.v.size(); ++k) {
    const double s = scores.v[k];
    g.v[k] = (s > eps && s < 1.0 - eps) ? -scale / (1.0 - s) : 0.0;
  }
  return g;
}

Tensor4 l1_loss_grad(const Tensor4& generated, const Tensor4& target, double weight) {
  require(generated.same_shape(target), "l1_loss_grad: shape mismatch");
  Tensor4 g(generated.n, generated.c, generated.h, generated.w);
  const double scale = weight / static_cast<double>(generated.v.size());
  for (size_t k = 0; k < generated.v.size(); ++k) {
    const double d = generated.v[k] - target.v[k];
    g.v[k] = d > 0 ? scale : (d < 0 ? -scale : 0.0);
  }
  return g;
}

// ---- batches ----------------------------------------------------------------------

Tensor4 image_to_tensor(const Image& img) {
  Tensor4 t(1, 3, img.h, img.w);
  std::copy(img.v.begin(), img.v.end(), t.v.begin());
  return t;
}

Image tensor_to_image(const Tensor4& t, int sample) {
  require(t.c == 3 && sample >= 0 && sample < t.n, "tensor_to_image: bad shape");
  Image img(t.h, t.w);
  const double* s = t.sample(sample);
  std::copy(s, s + img.v.size(), img.v.begin());
  return img;
}

namespace {

void fill_sample_inputs(Tensor4& in21, Tensor4& img3, Tensor4& heat18, int i,
                        const Image& image, const HeatMapStack& heat) {
  const size_t plane = static_cast<size_t>(image.h) * image.w;
  double* dst = in21.sample(i);
  std::copy(image.v.begin(), image.v.end(), dst);
  for (int j = 0; j < kNumLandmarks; ++j)
    std::copy(heat.channels[j].v.begin(), heat.channels[j].v.end(),
              dst + (3 + j) * plane);
  std::copy(image.v.begin(), image.v.end(), img3.sample(i));
  double* hdst = heat18.sample(i);
  for (int j = 0; j < kNumLandmarks; ++j)
    std::copy(heat.channels[j].v.begin(), heat.channels[j].v.end(), hdst + j * plane);
}

}  // namespace

Batch make_batch(const std::vector<const PreparedSample*>& src,
                 const std::vector<const PreparedSample*>& tgt, double masked_fill) {
  require(!src.empty() && src.size() == tgt.size(), "make_batch: bad pair lists");
  const int n = static_cast<int>(src.size());
  const int h = src[0]->image.h, w = src[0]->image.w;
  Batch b;
  b.src_in = Tensor4(n, kGeneratorInputChannels, h, w);
  b.tgt_in = Tensor4(n, kGeneratorInputChannels, h, w);
  b.src_img = Tensor4(n, 3, h, w);
  b.tgt_img = Tensor4(n, 3, h, w);
  b.src_heat = Tensor4(n, kNumLandmarks, h, w);
  b.tgt_heat = Tensor4(n, kNumLandmarks, h, w);
  for (int i = 0; i < n; ++i) {
    fill_sample_inputs(b.src_in, b.src_img, b.src_heat, i, src[i]->image, src[i]->heat);
    const Image tgt_bg = split_background(tgt[i]->image, tgt[i]->body, masked_fill);
    fill_sample_inputs(b.tgt_in, b.tgt_img, b.tgt_heat, i, tgt_bg, tgt[i]->heat);
    // tgt_img must stay the un-split target image (L1 target, D inputs).
    std::copy(tgt[i]->image.v.begin(), tgt[i]->image.v.end(), b.tgt_img.sample(i));
    WarpContext ctx;
    ctx.refined_masks = src[i]->refined;
    ctx.affines = fit_part_affines(src[i]->landmarks, tgt[i]->landmarks, src[i]->d_s);
    b.warps.push_back(std::move(ctx));
  }
  return b;
}

Batch make_batch(const PairedDataset& ds, const std::vector<PairRecord>& chosen,
                 double masked_fill) {
  std::vector<const PreparedSample*> src, tgt;
  for (const PairRecord& p : chosen) {
    src.push_back(&ds.sample(p.src_id));
    tgt.push_back(&ds.sample(p.tgt_id));
  }
  return make_batch(src, tgt, masked_fill);
}

// ---- model bundle / checkpoints ---------------------------------------------------

ModelBundle ModelBundle::create(const GeneratorSpec& gspec, int d_base_channels,
                                uint64_t init_seed) {
  ModelBundle b;
  b.gspec = gspec;
  b.d_base_channels = d_base_channels;
  std::mt19937_64 init_rng(init_seed);
  b.generator = std::make_unique<Generator>(gspec, init_rng);
  b.d1 = std::make_unique<Discriminator>(
      DiscriminatorSpec{kD1InputChannels, d_base_channels}, init_rng);
  b.d2 = std::make_unique<Discriminator>(DiscriminatorSpec{kImageChannels, d_base_channels},
                                         init_rng);
  return b;
}

namespace {

constexpr char kCkptMagic[8] = {'P', 'C', 'G', 'A', 'N', 'C', 'K', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

void write_doubles(std::ostream& out, const std::vector<double>& v) {
  write_pod<int64_t>(out, static_cast<int64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles_into(std::istream& in, std::vector<double>& v) {
  const auto count = read_pod<int64_t>(in);
  if (count != static_cast<int64_t>(v.size()))
    throw std::runtime_error("checkpoint: tensor size mismatch");
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<ParamRef> all_params(ModelBundle& models) {
  std::vector<ParamRef> params = models.generator->params();
  for (ParamRef& p : models.d1->params()) {
    p.name = "D1/" + p.name;
    params.push_back(p);
  }
  for (ParamRef& p : models.d2->params()) {
    p.name = "D2/" + p.name;
    params.push_back(p);
  }
  return params;
}

void write_adam(std::ostream& out, const Adam& opt) {
  write_pod<int64_t>(out, opt.step_count_);
  write_pod<int32_t>(out, static_cast<int32_t>(opt.m_.size()));
  for (size_t i = 0; i < opt.m_.size(); ++i) {
    write_doubles(out, opt.m_[i]);
    write_doubles(out, opt.v_[i]);
  }
}

void read_adam(std::istream& in, Adam& opt) {
  opt.step_count_ = read_pod<int64_t>(in);
  const auto n = read_pod<int32_t>(in);
  if (n != static_cast<int32_t>(opt.m_.size()))
    throw std::runtime_error("checkpoint: optimizer group count mismatch");
  for (int32_t i = 0; i < n; ++i) {
    read_doubles_into(in, opt.m_[i]);
    read_doubles_into(in, opt.v_[i]);
  }
}

void write_spec(std::ostream& out, const GeneratorSpec& s) {
  write_pod<int32_t>(out, s.depth);
  write_pod<int32_t>(out, s.input_h);
  write_pod<int32_t>(out, s.input_w);
  write_pod<int32_t>(out, s.base_channels);
  write_pod<int32_t>(out, s.skip_depth);
  write_pod<double>(out, s.dropout_rate);
}

GeneratorSpec read_spec(std::istream& in) {
  GeneratorSpec s;
  s.depth = read_pod<int32_t>(in);
  s.input_h = read_pod<int32_t>(in);
  s.input_w = read_pod<int32_t>(in);
  s.base_channels = read_pod<int32_t>(in);
  s.skip_depth = read_pod<int32_t>(in);
  s.dropout_rate = read_pod<double>(in);
  return s;
}

}  // namespace

void save_checkpoint(const fs::path& path, ModelBundle& models, int epoch, const Adam* opt_g,
                     const Adam* opt_d1, const Adam* opt_d2) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path.string());
  out.write(kCkptMagic, sizeof(kCkptMagic));
  write_spec(out, models.gspec);
  write_pod<int32_t>(out, models.d_base_channels);
  write_pod<int32_t>(out, epoch);

  const auto params = all_params(models);
  write_pod<int32_t>(out, static_cast<int32_t>(params.size()));
  for (const ParamRef& p : params) {
    write_pod<int32_t>(out, static_cast<int32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    write_doubles(out, *p.value);
  }
  const bool has_opt = opt_g && opt_d1 && opt_d2;
  write_pod<uint8_t>(out, has_opt ? 1 : 0);
  if (has_opt) {
    write_adam(out, *opt_g);
    write_adam(out, *opt_d1);
    write_adam(out, *opt_d2);
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

CheckpointInfo read_checkpoint_info(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, kCkptMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  CheckpointInfo info;
  info.gspec = read_spec(in);
  info.d_base_channels = read_pod<int32_t>(in);
  info.epoch = read_pod<int32_t>(in);
  return info;
}

int load_checkpoint(const fs::path& path, ModelBundle& models, Adam* opt_g, Adam* opt_d1,
                    Adam* opt_d2) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, kCkptMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  const GeneratorSpec spec = read_spec(in);
  const int d_base = read_pod<int32_t>(in);
  const int epoch = read_pod<int32_t>(in);
  require(spec.depth == models.gspec.depth && spec.input_h == models.gspec.input_h &&
              spec.input_w == models.gspec.input_w &&
              spec.base_channels == models.gspec.base_channels &&
              d_base == models.d_base_channels,
          "checkpoint: model spec mismatch");

  const auto params = all_params(models);
  const auto n = read_pod<int32_t>(in);
  if (n != static_cast<int32_t>(params.size()))
    throw std::runtime_error("checkpoint: parameter count mismatch");
  for (const ParamRef& p : params) {
    const auto name_len = read_pod<int32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (name != p.name) throw std::runtime_error("checkpoint: parameter order mismatch at " + name);
    read_doubles_into(in, *p.value);
  }
  const auto has_opt = read_pod<uint8_t>(in);
  if (opt_g || opt_d1 || opt_d2) {
    if (!has_opt) throw std::runtime_error("checkpoint: no optimizer state in " + path.string());
    read_adam(in, *opt_g);
    read_adam(in, *opt_d1);
    read_adam(in, *opt_d2);
  }
  if (!in) throw std::runtime_error("checkpoint: truncated file " + path.string());
  return epoch;
}

// ---- training loop --------------------------------------------------------------------

namespace {

Batch sample_batch(const PairedDataset& ds, std::mt19937_64& rng, int batch_size,
                   double masked_fill) {
  std::uniform_int_distribution<size_t> pick(0, ds.pairs().size() - 1);
  std::vector<PairRecord> chosen;
  for (int i = 0; i < batch_size; ++i) chosen.push_back(ds.pairs()[pick(rng)]);
  return make_batch(ds, chosen, masked_fill);
}

double grad_norm(const std::vector<ParamRef>& params) {
  double acc = 0;
  for (const ParamRef& p : params)
    for (double g : *p.grad) acc += g * g;
  return std::sqrt(acc);
}

// One discriminator update: real pass, fake pass, Adam step.
double update_discriminator(Discriminator& d, Adam& opt, const Tensor4& real,
                            const Tensor4& fake, double eps) {
  opt.zero_grad();
  const Tensor4 real_scores = d.forward(real, true);
  const double loss_real = mean_log(real_scores, eps);
  d.backward(dmean_log(real_scores, eps, -1.0));
  const Tensor4 fake_scores = d.forward(fake, true);
  const double loss_fake = mean_log1m(fake_scores, eps);
  d.backward(dmean_log1m(fake_scores, eps, -1.0));
  opt.step();
  return -(loss_real + loss_fake);
}

}  // namespace

TrainResult train_loop(const TrainConfig& config, const PairedDataset& dataset,
                       ModelBundle& models, Adam& opt_g, Adam& opt_d1, Adam& opt_d2,
                       const fs::path& out_dir, int start_epoch) {
  config.validate();
  require(!dataset.pairs().empty(), "train_loop: empty dataset");
  fs::create_directories(out_dir);
  std::ofstream log(out_dir / "loss_log.txt",
                    start_epoch > 0 ? std::ios::app : std::ios::trunc);
  if (!log) throw std::runtime_error("train_loop: cannot write loss log");
  log.precision(17);

  TrainResult result;
  Generator& gen = *models.generator;

  for (int epoch = start_epoch; epoch < config.epochs; ++epoch) {
    // Per-epoch reseeding keeps epoch-boundary resume bitwise exact.
    std::mt19937_64 rng(config.seed ^ (0x9e3779b97f4a7c15ull * (epoch + 1)));
    gen.seed_dropout(config.seed ^ (0xc2b2ae3d27d4eb4full * (epoch + 1)));
    double l1_sum = 0;

    for (int iter = 0; iter < config.iterations_per_epoch; ++iter) {
      double cgan = 0, gan = 0, d1_loss = 0, d2_loss = 0;

      for (int dstep = 0; dstep < config.d_steps_per_g_step; ++dstep) {
        Batch b = sample_batch(dataset, rng, config.batch_size, config.masked_fill);
        const Tensor4 fake = gen.forward(b.src_in, b.tgt_in, b.warps, true);
        const Tensor4 real_bundle = concat_channels(b.src_in, b.tgt_img, b.tgt_heat);
        const Tensor4 fake_bundle = concat_channels(b.src_in, fake, b.tgt_heat);
        d1_loss = update_discriminator(*models.d1, opt_d1, real_bundle, fake_bundle,
                                       config.clamp_eps);
        d2_loss = update_discriminator(*models.d2, opt_d2, b.tgt_img, fake, config.clamp_eps);
        cgan = -d1_loss;
        gan = -d2_loss;
        ++result.d_update_events;
      }

      Batch b = sample_batch(dataset, rng, config.batch_size, config.masked_fill);
      opt_g.zero_grad();
      const Tensor4 fake = gen.forward(b.src_in, b.tgt_in, b.warps, true);

      // Non-saturating adversarial terms: minimize -log D(fake).
      const Tensor4 fake_bundle = concat_channels(b.src_in, fake, b.tgt_heat);
      const Tensor4 s1 = models.d1->forward(fake_bundle, true);
      Tensor4 grad_bundle = models.d1->backward(dmean_log(s1, config.clamp_eps, -1.0));
      Tensor4 grad_fake = slice_channels(grad_bundle, kGeneratorInputChannels, kImageChannels);

      const Tensor4 s2 = models.d2->forward(fake, true);
      if (config.lambda1 != 0.0) {
        const Tensor4 g2 = models.d2->backward(dmean_log(s2, config.clamp_eps, -config.lambda1));
        for (size_t k = 0; k < grad_fake.v.size(); ++k) grad_fake.v[k] += g2.v[k];
      }

      const double l1 = l1_loss(fake, b.tgt_img);
      if (config.lambda2 != 0.0) {
        const Tensor4 gl1 = l1_loss_grad(fake, b.tgt_img, config.lambda2);
        for (size_t k = 0; k < grad_fake.v.size(); ++k) grad_fake.v[k] += gl1.v[k];
      }

      if (!std::isfinite(cgan) || !std::isfinite(gan) || !std::isfinite(l1) ||
          !std::isfinite(d1_loss) || !std::isfinite(d2_loss)) {
        std::ostringstream diag;
        diag << "train_loop: non-finite loss at epoch " << epoch + 1 << " iter " << iter + 1
             << " (cgan=" << cgan << " gan=" << gan << " l1=" << l1
             << " d1=" << d1_loss << " d2=" << d2_loss
             << " |gradG|=" << grad_norm(opt_g.params())
             << " |gradD1|=" << grad_norm(opt_d1.params())
             << " |gradD2|=" << grad_norm(opt_d2.params()) << ")";
        throw std::runtime_error(diag.str());
      }

      gen.backward(grad_fake);
      opt_g.step();
      ++result.g_update_events;
      l1_sum += l1;

      log << epoch + 1 << " " << iter + 1 << " " << cgan << " " << gan << " " << l1 << " "
          << d1_loss << " " << d2_loss << "\n";
    }

    result.epoch_mean_l1.push_back(l1_sum / config.iterations_per_epoch);
    result.last_epoch = epoch + 1;
    save_checkpoint(out_dir / ("ckpt_epoch_" + std::to_string(epoch + 1)), models, epoch + 1,
                    &opt_g, &opt_d1, &opt_d2);
    log.flush();
  }
  return result;
}

}  // namespace pcgan
