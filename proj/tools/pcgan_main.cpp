// pcgan command-line driver: synth, prepare, train, generate, evaluate,
// partition-debug. Exit codes: 0 success, 1 runtime failure, 2 usage or
// validation failure.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcgan/data.hpp"
#include "pcgan/metrics.hpp"
#include "pcgan/partition.hpp"
#include "pcgan/training.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using pcgan::cli::RunConfig;
using pcgan::cli::UsageError;

namespace {

const char* kPartNames[pcgan::kNumParts] = {
    "torso",       "head",        "l_upper_arm", "l_lower_arm", "r_upper_arm",
    "r_lower_arm", "l_upper_leg", "l_lower_leg", "r_upper_leg", "r_lower_leg"};

fs::path cache_dir_for(const fs::path& prepared_root) {
  if (const char* env = std::getenv("PCGAN_CACHE_ROOT"); env && *env) return fs::path(env);
  return prepared_root / "cache";
}

void announce(const std::string& cmd, std::initializer_list<std::pair<const char*, std::string>> paths) {
  std::cout << "pcgan " << cmd << "\n";
  for (const auto& [label, p] : paths) std::cout << "  " << label << ": " << p << "\n";
}

json load_json(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string(what) + ": cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw UsageError(std::string(what) + ": " + path.string() + ": " + e.what());
  }
  return doc;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

// ---- synth ---------------------------------------------------------------------

void cmd_synth(const RunConfig& cfg) {
  pcgan::SyntheticSpec spec;
  spec.ids = static_cast<int>(cfg.get_int("ids"));
  spec.poses_per_id = static_cast<int>(cfg.get_int("poses_per_id"));
  spec.height = static_cast<int>(cfg.get_int("height"));
  spec.width = static_cast<int>(cfg.get_int("width"));
  spec.seed = static_cast<uint64_t>(cfg.get_int("seed"));
  const fs::path out = cfg.require_string("out");
  announce("synth", {{"out", out.string()}});
  pcgan::write_synthetic_dataset(out, spec);
  cfg.echo(out);
  std::cout << "wrote " << spec.ids * spec.poses_per_id << " records\n";
}

// ---- prepare -------------------------------------------------------------------

std::vector<std::string> layout_problems(const fs::path& root) {
  std::vector<std::string> problems;
  for (const char* dir : {"images", "masks", "landmarks"})
    if (!fs::is_directory(root / dir)) problems.push_back("missing directory " + (root / dir).string());
  const fs::path pairs_file = root / "pairs.txt";
  if (!fs::is_regular_file(pairs_file)) {
    problems.push_back("missing file " + pairs_file.string());
    return problems;
  }
  if (!problems.empty()) return problems;
  std::ifstream in(pairs_file);
  std::string src, tgt;
  std::vector<std::string> ids;
  while (in >> src >> tgt) {
    ids.push_back(src);
    ids.push_back(tgt);
  }
  if (ids.empty()) problems.push_back("empty pair list " + pairs_file.string());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (const std::string& id : ids)
    for (const fs::path& p : {pcgan::image_path(root, id), pcgan::mask_path(root, id),
                              pcgan::landmark_path(root, id)})
      if (!fs::is_regular_file(p)) problems.push_back("missing file " + p.string());
  return problems;
}

void cmd_prepare(const RunConfig& cfg) {
  const fs::path root = cfg.require_string("dataset_root");
  const fs::path out = cfg.require_string("out");
  const fs::path cache = cache_dir_for(out);
  announce("prepare", {{"dataset_root", root.string()}, {"out", out.string()},
                       {"cache", cache.string()}});

  const std::vector<std::string> problems = layout_problems(root);
  if (!problems.empty()) {
    std::cerr << "dataset validation failed (" << problems.size() << " problems):\n";
    for (const std::string& p : problems) std::cerr << "  " << p << "\n";
    throw UsageError("invalid dataset layout under " + root.string());
  }

  pcgan::DatasetManifest manifest =
      pcgan::scan_dataset(root, cfg.get_string("split"), static_cast<int>(cfg.get_int("height")),
                          static_cast<int>(cfg.get_int("width")));
  const pcgan::FilterReport report = pcgan::filter_detectable(manifest);
  if (manifest.pairs.empty()) throw UsageError("no usable pairs after filtering");

  fs::create_directories(out);
  fs::create_directories(cache);
  const double sigma = cfg.get_double("sigma");
  const bool squared = cfg.get_bool("squared_heatmaps");
  for (const std::string& id : manifest.referenced_ids()) {
    const pcgan::Image image = pcgan::image_from_8bit(pcgan::read_image8(pcgan::image_path(root, id)));
    if (image.h != manifest.height || image.w != manifest.width)
      throw UsageError("image " + id + " does not match the requested resolution");
    const pcgan::Grid body = pcgan::mask_from_8bit(pcgan::read_image8(pcgan::mask_path(root, id)));
    const pcgan::LandmarkSet lm = pcgan::read_landmark_file(pcgan::landmark_path(root, id));
    pcgan::write_prepared_cache(cache / (id + ".bin"),
                                pcgan::prepare_sample(id, image, lm, body, sigma, squared));
  }
  manifest.save(out / "manifest.json");

  json rep;
  rep["cache_dir"] = cache.string();
  rep["sigma"] = sigma;
  rep["squared_heatmaps"] = squared;
  rep["dropped_ids"] = report.dropped_ids;
  rep["pairs_before"] = report.pairs_before;
  rep["pairs_after"] = report.pairs_after;
  rep["num_records"] = manifest.referenced_ids().size();
  write_json(out / "prepare_report.json", rep);
  cfg.echo(out);
  std::cout << "prepared " << manifest.referenced_ids().size() << " records, "
            << manifest.pairs.size() << " pairs (" << report.dropped_ids.size()
            << " dropped)\n";
}

// ---- train ---------------------------------------------------------------------

struct PreparedInputs {
  pcgan::DatasetManifest manifest;
  fs::path cache;
};

PreparedInputs open_prepared(const fs::path& data_dir) {
  if (!fs::is_regular_file(data_dir / "manifest.json"))
    throw UsageError("prepared data: missing " + (data_dir / "manifest.json").string());
  PreparedInputs in;
  in.manifest = pcgan::DatasetManifest::load(data_dir / "manifest.json");
  const json rep = load_json(data_dir / "prepare_report.json", "prepared data");
  in.cache = fs::path(rep.at("cache_dir").get<std::string>());
  if (const char* env = std::getenv("PCGAN_CACHE_ROOT"); env && *env) in.cache = fs::path(env);
  if (!fs::is_directory(in.cache))
    throw UsageError("prepared data: missing cache directory " + in.cache.string());
  return in;
}

void check_depth_resolution(int depth, int h, int w) {
  if (h == 256 && w == 256 && depth != 7)
    throw UsageError("256x256 inputs require depth 7 (got depth " + std::to_string(depth) + ")");
  if (h == 128 && w == 64 && depth != 6)
    throw UsageError("128x64 inputs require depth 6 (got depth " + std::to_string(depth) + ")");
}

pcgan::TrainConfig train_config_from(const RunConfig& cfg) {
  pcgan::TrainConfig tc;
  tc.lr = cfg.get_double("lr");
  tc.beta1 = cfg.get_double("beta1");
  tc.beta2 = cfg.get_double("beta2");
  tc.epochs = static_cast<int>(cfg.get_int("epochs"));
  tc.iterations_per_epoch = static_cast<int>(cfg.get_int("iterations_per_epoch"));
  tc.d_steps_per_g_step = static_cast<int>(cfg.get_int("d_steps_per_g_step"));
  tc.lambda1 = cfg.get_double("lambda1");
  tc.lambda2 = cfg.get_double("lambda2");
  tc.batch_size = static_cast<int>(cfg.get_int("batch_size"));
  tc.seed = static_cast<uint64_t>(cfg.get_int("seed"));
  tc.clamp_eps = cfg.get_double("clamp_eps");
  tc.masked_fill = cfg.get_double("masked_fill");
  tc.validate();
  return tc;
}

int latest_checkpoint_epoch(const fs::path& dir) {
  int best = -1;
  if (!fs::is_directory(dir)) return best;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("ckpt_epoch_", 0) != 0) continue;
    try {
      best = std::max(best, std::stoi(name.substr(11)));
    } catch (...) {
    }
  }
  return best;
}

void cmd_train(const RunConfig& cfg) {
  const fs::path data_dir = cfg.require_string("data");
  const fs::path out = cfg.require_string("out");
  const PreparedInputs in = open_prepared(data_dir);
  announce("train", {{"data", data_dir.string()}, {"cache", in.cache.string()},
                     {"out", out.string()}});

  pcgan::GeneratorSpec gspec;
  gspec.depth = static_cast<int>(cfg.get_int("depth"));
  gspec.input_h = in.manifest.height;
  gspec.input_w = in.manifest.width;
  gspec.base_channels = static_cast<int>(cfg.get_int("base_channels"));
  gspec.dropout_rate = cfg.get_double("dropout_rate");
  check_depth_resolution(gspec.depth, gspec.input_h, gspec.input_w);
  try {
    gspec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const int d_base = static_cast<int>(cfg.get_int("d_base_channels"));
  const pcgan::TrainConfig tc = train_config_from(cfg);

  const pcgan::PairedDataset dataset = pcgan::PairedDataset::load_cached(in.manifest, in.cache);
  pcgan::ModelBundle models = pcgan::ModelBundle::create(gspec, d_base, tc.seed);
  pcgan::Adam opt_g(models.generator->params(), tc.lr, tc.beta1, tc.beta2);
  pcgan::Adam opt_d1(models.d1->params(), tc.lr, tc.beta1, tc.beta2);
  pcgan::Adam opt_d2(models.d2->params(), tc.lr, tc.beta1, tc.beta2);

  int start_epoch = 0;
  if (cfg.get_bool("resume")) {
    const int latest = latest_checkpoint_epoch(out);
    if (latest >= 0) {
      const fs::path ckpt = out / ("ckpt_epoch_" + std::to_string(latest));
      const pcgan::CheckpointInfo info = pcgan::read_checkpoint_info(ckpt);
      if (info.gspec.depth != gspec.depth || info.gspec.input_h != gspec.input_h ||
          info.gspec.input_w != gspec.input_w ||
          info.gspec.base_channels != gspec.base_channels || info.d_base_channels != d_base)
        throw UsageError("checkpoint " + ckpt.string() +
                         " does not match the requested model (resolution/depth/channels)");
      start_epoch = pcgan::load_checkpoint(ckpt, models, &opt_g, &opt_d1, &opt_d2);
      std::cout << "resuming from " << ckpt.string() << " (epoch " << start_epoch << ")\n";
    }
  }
  if (start_epoch >= tc.epochs) {
    std::cout << "nothing to do: " << start_epoch << "/" << tc.epochs << " epochs complete\n";
    cfg.echo(out);
    return;
  }

  fs::create_directories(out);
  cfg.echo(out);
  const pcgan::TrainResult result =
      pcgan::train_loop(tc, dataset, models, opt_g, opt_d1, opt_d2, out, start_epoch);
  std::cout << "trained epochs " << start_epoch + 1 << ".." << result.last_epoch << ": "
            << result.d_update_events << " D updates, " << result.g_update_events
            << " G updates\n";
  for (size_t i = 0; i < result.epoch_mean_l1.size(); ++i)
    std::cout << "epoch " << start_epoch + 1 + i << " mean L1 " << result.epoch_mean_l1[i]
              << "\n";
}

// ---- generate ------------------------------------------------------------------

pcgan::PreparedSample load_cached_sample(const PreparedInputs& in, const std::string& id) {
  const fs::path p = in.cache / (id + ".bin");
  if (!fs::is_regular_file(p)) throw UsageError("sample '" + id + "' is not prepared: " + p.string());
  return pcgan::read_prepared_cache(p);
}

void cmd_generate(const RunConfig& cfg) {
  const fs::path ckpt = cfg.require_string("checkpoint");
  const fs::path data_dir = cfg.require_string("data");
  const std::string src_id = cfg.require_string("src_id");
  const std::string tgt_id = cfg.require_string("tgt_id");
  const fs::path out = cfg.require_string("out");
  if (!fs::is_regular_file(ckpt)) throw UsageError("checkpoint: missing file " + ckpt.string());
  const PreparedInputs in = open_prepared(data_dir);
  announce("generate", {{"checkpoint", ckpt.string()}, {"data", data_dir.string()},
                        {"out", out.string()}});

  const pcgan::PreparedSample src = load_cached_sample(in, src_id);
  const pcgan::PreparedSample tgt = load_cached_sample(in, tgt_id);
  const pcgan::CheckpointInfo info = pcgan::read_checkpoint_info(ckpt);
  if (info.gspec.input_h != src.image.h || info.gspec.input_w != src.image.w)
    throw UsageError("checkpoint resolution does not match the prepared samples");

  pcgan::ModelBundle models = pcgan::ModelBundle::create(info.gspec, info.d_base_channels, 0);
  const int epoch = pcgan::load_checkpoint(ckpt, models);

  const pcgan::Batch b =
      pcgan::make_batch({&src}, {&tgt}, cfg.get_double("masked_fill"));
  const pcgan::Tensor4 fake = models.generator->forward(b.src_in, b.tgt_in, b.warps, false);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  pcgan::write_image8(out, pcgan::image_to_8bit(pcgan::tensor_to_image(fake, 0)));

  json prov;
  prov["checkpoint"] = ckpt.string();
  prov["checkpoint_epoch"] = epoch;
  prov["src_id"] = src_id;
  prov["tgt_id"] = tgt_id;
  prov["config_hash"] = cfg.hash_hex();
  write_json(out.string() + ".provenance.json", prov);
  std::cout << "wrote " << out.string() << "\n";
}

// ---- evaluate ------------------------------------------------------------------

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw UsageError("missing directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ext) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("no " + ext + " files in " + dir.string());
  return files;
}

std::vector<pcgan::Image> read_images(const std::vector<fs::path>& files) {
  std::vector<pcgan::Image> out;
  out.reserve(files.size());
  for (const fs::path& p : files) out.push_back(pcgan::image_from_8bit(pcgan::read_image8(p)));
  return out;
}

void cmd_evaluate(const RunConfig& cfg) {
  const fs::path gen_dir = cfg.require_string("generated");
  const fs::path real_dir = cfg.require_string("real");
  const std::string masks_dir = cfg.get_string("masks");
  const fs::path out = cfg.require_string("out");
  const std::string backend_name = cfg.get_string("backend");
  const int splits = static_cast<int>(cfg.get_int("splits"));
  announce("evaluate", {{"generated", gen_dir.string()}, {"real", real_dir.string()},
                        {"out", out.string()}});

  if (backend_name != "color-stat")
    throw UsageError("backend unavailable: '" + backend_name + "' (known: color-stat)");
  const pcgan::ColorStatBackend backend;

  const std::vector<fs::path> gen_files = sorted_files(gen_dir, ".ppm");
  const std::vector<pcgan::Image> generated = read_images(gen_files);
  const std::vector<pcgan::Image> real = read_images(sorted_files(real_dir, ".ppm"));

  json report;
  report["backend"] = backend.name();
  report["config_hash"] = cfg.hash_hex();
  json records = json::array();

  const auto [is_mean, is_std] =
      pcgan::inception_score(backend.predict(generated), backend.num_classes(), splits);
  records.push_back({{"metric", "inception_score"},
                     {"value", is_mean},
                     {"std_dev", is_std},
                     {"n", generated.size()}});

  if (!masks_dir.empty()) {
    std::vector<pcgan::Grid> masks;
    for (const fs::path& f : gen_files) {
      const fs::path m = fs::path(masks_dir) / (f.stem().string() + ".pgm");
      if (!fs::is_regular_file(m)) throw UsageError("missing mask " + m.string());
      masks.push_back(pcgan::mask_from_8bit(pcgan::read_image8(m)));
    }
    const auto [mis_mean, mis_std] = pcgan::mask_inception_score(generated, masks, backend, splits);
    records.push_back({{"metric", "mask_inception_score"},
                       {"value", mis_mean},
                       {"std_dev", mis_std},
                       {"n", generated.size()}});
  }

  const double fid = pcgan::frechet_distance(
      backend.features(generated), static_cast<int>(generated.size()), backend.features(real),
      static_cast<int>(real.size()), backend.feature_dim());
  records.push_back(
      {{"metric", "frechet_distance"}, {"value", fid}, {"std_dev", 0.0}, {"n", generated.size()}});

  report["records"] = records;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_json(out, report);
  for (const auto& r : records)
    std::cout << r.at("metric").get<std::string>() << " = " << r.at("value").get<double>() << "\n";
}

// ---- partition-debug -------------------------------------------------------------

void cmd_partition_debug(const RunConfig& cfg) {
  const fs::path data_dir = cfg.require_string("data");
  const std::string id = cfg.require_string("id");
  const fs::path out = cfg.require_string("out");
  const PreparedInputs in = open_prepared(data_dir);
  announce("partition-debug", {{"data", data_dir.string()}, {"id", id}, {"out", out.string()}});

  const pcgan::PreparedSample s = load_cached_sample(in, id);
  const pcgan::RegionMaskSet regions =
      pcgan::build_region_masks(s.landmarks, s.d_s, s.image.h, s.image.w);
  fs::create_directories(out);
  for (int i = 0; i < pcgan::kNumParts; ++i) {
    pcgan::write_image8(out / ("region_" + std::string(kPartNames[i]) + ".pgm"),
                        pcgan::mask_to_8bit(regions.regions[i]));
    pcgan::write_image8(out / ("refined_" + std::string(kPartNames[i]) + ".pgm"),
                        pcgan::mask_to_8bit(s.refined[i]));
  }

  // Heat composite: per-pixel max over the 18 channels, scaled to 8 bits.
  pcgan::Image8 heat;
  heat.h = s.image.h;
  heat.w = s.image.w;
  heat.channels = 1;
  heat.v.assign(static_cast<size_t>(heat.h) * heat.w, 0);
  for (int r = 0; r < heat.h; ++r)
    for (int c = 0; c < heat.w; ++c) {
      double mx = 0;
      for (int j = 0; j < pcgan::kNumLandmarks; ++j)
        mx = std::max(mx, s.heat.channels[j].at(r, c));
      heat.at(r, c, 0) = static_cast<uint8_t>(std::lround(255.0 * std::clamp(mx, 0.0, 1.0)));
    }
  pcgan::write_image8(out / "heat_composite.pgm", heat);

  pcgan::write_image8(out / "foreground.ppm",
                      pcgan::image_to_8bit(pcgan::split_foreground(s.image, s.body)));
  pcgan::write_image8(out / "background.ppm",
                      pcgan::image_to_8bit(pcgan::split_background(s.image, s.body)));
  std::cout << "wrote 23 files to " << out.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partition-controlled person image generation pipeline"};
  app.require_subcommand(1);

  RunConfig cfg_synth, cfg_prepare, cfg_train, cfg_generate, cfg_evaluate, cfg_pdebug;

  CLI::App* synth = app.add_subcommand("synth", "write a hermetic stick-figure dataset");
  cfg_synth.attach(synth);
  cfg_synth.add_string("out", "", "output dataset directory");
  cfg_synth.add_int("ids", 2, "number of identities");
  cfg_synth.add_int("poses_per_id", 2, "poses per identity");
  cfg_synth.add_int("height", 128, "image height");
  cfg_synth.add_int("width", 64, "image width");
  cfg_synth.add_int("seed", 7, "generation seed");

  CLI::App* prepare = app.add_subcommand("prepare", "validate a dataset and precompute tensors");
  cfg_prepare.attach(prepare);
  cfg_prepare.add_string("dataset_root", "", "raw dataset directory");
  cfg_prepare.add_string("out", "", "prepared output directory");
  cfg_prepare.add_string("split", "train", "split label recorded in the manifest");
  cfg_prepare.add_int("height", 128, "expected image height");
  cfg_prepare.add_int("width", 64, "expected image width");
  cfg_prepare.add_double("sigma", 6.0, "heat-map falloff sigma");
  cfg_prepare.add_bool("squared_heatmaps", false, "use the squared-distance heat-map variant");

  CLI::App* train = app.add_subcommand("train", "train on a prepared dataset");
  cfg_train.attach(train);
  cfg_train.add_string("data", "", "prepared dataset directory (from prepare)");
  cfg_train.add_string("out", "", "run directory for checkpoints and logs");
  cfg_train.add_int("depth", 6, "encoder depth (6 for 128x64, 7 for 256x256)");
  cfg_train.add_int("base_channels", 64, "generator base channel count");
  cfg_train.add_int("d_base_channels", 64, "discriminator base channel count");
  cfg_train.add_double("dropout_rate", 0.5, "decoder dropout rate");
  cfg_train.add_double("lr", 2e-4, "Adam learning rate");
  cfg_train.add_double("beta1", 0.5, "Adam beta1");
  cfg_train.add_double("beta2", 0.999, "Adam beta2");
  cfg_train.add_int("epochs", 90, "total epochs");
  cfg_train.add_int("iterations_per_epoch", 500, "iterations per epoch");
  cfg_train.add_int("d_steps_per_g_step", 2, "discriminator steps per generator step");
  cfg_train.add_double("lambda1", 1.0, "weight of the unconditional adversarial term");
  cfg_train.add_double("lambda2", 0.01, "weight of the L1 term");
  cfg_train.add_int("batch_size", 4, "batch size");
  cfg_train.add_int("seed", 0, "training seed");
  cfg_train.add_double("clamp_eps", 1e-7, "score clamp epsilon inside log terms");
  cfg_train.add_double("masked_fill", 0.0, "value written into split-out pixels, [-1,1] space");
  cfg_train.add_bool("resume", false, "resume from the latest checkpoint in --out");

  CLI::App* generate = app.add_subcommand("generate", "render one source/target pair");
  cfg_generate.attach(generate);
  cfg_generate.add_string("checkpoint", "", "checkpoint file");
  cfg_generate.add_string("data", "", "prepared dataset directory");
  cfg_generate.add_string("src_id", "", "source sample id (appearance)");
  cfg_generate.add_string("tgt_id", "", "target sample id (pose and background)");
  cfg_generate.add_string("out", "", "output image path (.ppm)");
  cfg_generate.add_double("masked_fill", 0.0, "value written into split-out pixels");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score generated images against real ones");
  cfg_evaluate.attach(evaluate);
  cfg_evaluate.add_string("generated", "", "directory of generated .ppm images");
  cfg_evaluate.add_string("real", "", "directory of real .ppm images");
  cfg_evaluate.add_string("masks", "", "directory of person masks (.pgm) for mask-IS");
  cfg_evaluate.add_string("backend", "color-stat", "classifier backend name");
  cfg_evaluate.add_int("splits", 1, "inception-score split count");
  cfg_evaluate.add_string("out", "", "metric report path (.json)");

  CLI::App* pdebug = app.add_subcommand("partition-debug", "emit partition overlays for one sample");
  cfg_pdebug.attach(pdebug);
  cfg_pdebug.add_string("data", "", "prepared dataset directory");
  cfg_pdebug.add_string("id", "", "prepared sample id");
  cfg_pdebug.add_string("out", "", "output directory");

  try {
    app.parse(argc, argv);
    for (auto& [cmd, cfg, fn] :
         std::vector<std::tuple<CLI::App*, RunConfig*, void (*)(const RunConfig&)>>{
             {synth, &cfg_synth, cmd_synth},
             {prepare, &cfg_prepare, cmd_prepare},
             {train, &cfg_train, cmd_train},
             {generate, &cfg_generate, cmd_generate},
             {evaluate, &cfg_evaluate, cmd_evaluate},
             {pdebug, &cfg_pdebug, cmd_partition_debug}}) {
      if (app.got_subcommand(cmd)) {
        cfg->resolve();
        fn(*cfg);
      }
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
