// ucgan: dataset preparation, training, inference, baselines and evaluation.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ucgan/error.hpp"
#include "ucgan/imaging/io.hpp"
#include "ucgan/train/train.hpp"

namespace fs = std::filesystem;
using namespace ucgan;

namespace {

struct SynthArgs {
  fs::path out;
  std::size_t count = 64;
  std::uint32_t size = 64;
  std::uint64_t seed = 0;
  std::uint16_t bit_depth = 11;
};

struct WaldArgs {
  fs::path sources;
  fs::path out;
  std::uint32_t patch = 256;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  bool tile = false;
};

struct TrainArgs {
  fs::path data;
  fs::path out;
  fs::path config;
  std::string preset;
  std::optional<double> lr;
  std::optional<std::size_t> epochs, batch_size, max_iterations, holdout, checkpoint_every;
  std::vector<std::string> disable;
  std::optional<std::string> block, pool;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

struct PansharpenArgs {
  fs::path checkpoint, pan, ms, out, png;
};

struct BaselineArgs {
  std::string method;
  fs::path pan, ms, out, png;
};

struct EvalArgs {
  fs::path data;
  std::string mode = "full_scale";
  fs::path checkpoint;
  std::string method;
  fs::path out;
};

void write_json(const nlohmann::json& j, const fs::path& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

int run_synth(const SynthArgs& a) {
  const auto pairs = data::synth_dataset(a.count, a.size, a.seed, a.bit_depth);
  data::write_dataset(a.out, pairs, data::Mode::full_scale);
  std::cout << "wrote " << pairs.size() << " synthetic pairs to " << a.out.string() << '\n';
  return 0;
}

int run_wald(const WaldArgs& a) {
  data::DatasetSpec spec;
  spec.source_dir = a.sources.parent_path();
  spec.mode = data::Mode::wald;
  spec.train_patch = a.patch;
  spec.test_patch = a.patch;
  spec.count = a.count;
  spec.seed = a.seed;
  const auto sources = data::load_sources(a.sources);
  const auto pairs = a.tile ? data::tile_test_patches(sources, spec) : data::sample_training_patches(sources, spec);
  data::write_dataset(a.out, pairs, data::Mode::wald);
  std::cout << "wrote " << pairs.size() << " Wald-protocol pairs to " << a.out.string() << '\n';
  return 0;
}

train::TrainConfig resolve_config(const TrainArgs& a) {
  train::TrainConfig c = a.config.empty() ? train::TrainConfig{} : train::load_train_config(a.config);
  if (!a.preset.empty()) {
    bool found = false;
    for (const auto& grid : {train::loss_ablation_grid(), train::weight_sweep_grid()}) {
      for (const auto& p : grid) {
        if (p.name == a.preset) {
          c.loss_weights = p.weights;
          found = true;
        }
      }
    }
    if (!found) throw ContractError("unknown preset '" + a.preset + "' (see --list-presets)");
  }
  if (a.lr) c.learning_rate = *a.lr;
  if (a.epochs) c.epochs = *a.epochs;
  if (a.batch_size) c.batch_size = *a.batch_size;
  if (a.max_iterations) c.max_iterations = *a.max_iterations;
  if (a.holdout) c.holdout = *a.holdout;
  if (a.checkpoint_every) c.checkpoint_every = *a.checkpoint_every;
  for (const auto& t : a.disable) c.loss_weights.set_enabled(losses::parse_term(t), false);
  if (a.block) c.block_kind = net::parse_block_kind(*a.block);
  if (a.pool) c.pooling_kind = losses::parse_pooling(*a.pool);
  if (a.seed) c.seed = *a.seed;
  c.validate();
  return c;
}

int run_train(const TrainArgs& a) {
  const auto config = resolve_config(a);
  const auto pairs = data::load_pairs(a.data, false);
  fs::create_directories(a.out);
  write_json(config.to_json(), a.out / "config.json");
  train::TrainOutputs outputs;
  outputs.log_path = a.out / "train_log.jsonl";
  outputs.checkpoint_dir = a.out / "checkpoints";
  if (!a.quiet) {
    outputs.on_iteration = [](const train::IterationLog& r) {
      std::printf("iter %zu  epoch %zu  g_total %.6g\n", r.iteration, r.epoch, r.g_total);
    };
    outputs.on_eval = [](const train::EpochEval& e) {
      std::printf("eval epoch %zu  iter %zu  held-out QNR %.6f\n", e.epoch, e.iteration, e.qnr);
    };
  }
  const auto result = train::train(config, pairs, outputs);
  if (!result.evals.empty()) {
    std::printf("held-out QNR %.6f -> %.6f\n", result.initial_qnr(), result.final_qnr());
  }
  std::cout << "checkpoint: " << (outputs.checkpoint_dir / "final.ucgk").string() << '\n';
  return 0;
}

int run_pansharpen(const PansharpenArgs& a) {
  train::pansharpen_files(a.checkpoint, a.pan, a.ms, a.out, a.png);
  return 0;
}

int run_baseline(const BaselineArgs& a) {
  const auto pan = imaging::load_raster(a.pan);
  const auto ms = imaging::load_raster(a.ms);
  imaging::RasterImage fused;
  if (a.method == "bicubic") {
    fused = baselines::bicubic_baseline(ms);
  } else {
    const auto r = baselines::fuse_baseline(baselines::parse_baseline_kind(a.method), pan, ms);
    if (r.guarded_pixels > 0) std::cerr << r.guarded_pixels << " pixels kept the upsampled MS (divisor < 1)\n";
    fused = r.fused;
  }
  imaging::save_raster(fused, a.out);
  if (!a.png.empty()) imaging::export_rgb_png(fused, a.png);
  return 0;
}

int run_eval(const EvalArgs& a) {
  const auto mode = data::parse_mode(a.mode);
  if (a.checkpoint.empty() == a.method.empty()) throw ContractError("eval needs exactly one of --checkpoint or --method");
  const auto pairs = data::load_pairs(a.data, mode == data::Mode::wald);
  std::string name;
  train::FuseMethod fuse;
  if (!a.checkpoint.empty()) {
    name = "ucgan:" + a.checkpoint.filename().string();
    fuse = train::generator_method(net::load_generator(a.checkpoint));
  } else if (a.method == "bicubic") {
    name = "bicubic";
    fuse = train::bicubic_method();
  } else if (a.method == "reference") {
    name = "reference";
    fuse = train::reference_method();
  } else {
    name = a.method;
    fuse = train::baseline_method(baselines::parse_baseline_kind(a.method));
  }
  write_json(train::evaluate(name, fuse, pairs, mode).to_json(), a.out);
  return 0;
}

int run_gradcheck(std::uint64_t seed) {
  bool ok = true;
  for (const auto& e : train::loss_gradient_suite(seed)) {
    std::printf("%-28s rel err %.3e  %s\n", e.name.c_str(), e.relative_error, e.passed() ? "ok" : "FAIL");
    ok = ok && e.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised pan-sharpening: data, training, inference and evaluation"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic dataset (references hold the hidden HR MS)");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--count", synth.count, "Number of scenes")->check(CLI::PositiveNumber);
  s->add_option("--size", synth.size, "PAN side in pixels (multiple of 4)");
  s->add_option("--seed", synth.seed, "Seed of the first scene");
  s->add_option("--bit-depth", synth.bit_depth, "Bits per sample")->check(CLI::Range(8, 16));

  WaldArgs wald;
  auto* w = app.add_subcommand("wald", "Cut Wald-protocol (degraded) pairs from full-resolution sources");
  w->add_option("--sources", wald.sources, "Source manifest.json")->required()->check(CLI::ExistingFile);
  w->add_option("--out", wald.out, "Output directory")->required();
  w->add_option("--patch", wald.patch, "PAN-side patch size before degradation");
  w->add_option("--count", wald.count, "Number of random patches");
  w->add_option("--seed", wald.seed, "Sampling seed");
  w->add_flag("--tile", wald.tile, "Tile every source in order instead of sampling");

  TrainArgs tr;
  bool list_presets = false;
  auto* t = app.add_subcommand("train", "Train the generator and discriminator on full-scale pairs");
  t->add_option("--data", tr.data, "Training manifest.json")->check(CLI::ExistingFile);
  t->add_option("--out", tr.out, "Run directory (log, config, checkpoints)");
  t->add_option("--config", tr.config, "JSON config; flags override it")->check(CLI::ExistingFile);
  t->add_option("--preset", tr.preset, "Named loss-weight preset");
  t->add_flag("--list-presets", list_presets, "Print the preset names and exit");
  t->add_option("--lr", tr.lr, "Learning rate");
  t->add_option("--epochs", tr.epochs, "Epochs");
  t->add_option("--batch-size", tr.batch_size, "Batch size");
  t->add_option("--max-iterations", tr.max_iterations, "Stop after this many iterations");
  t->add_option("--holdout", tr.holdout, "Trailing pairs held out for QNR");
  t->add_option("--checkpoint-every", tr.checkpoint_every, "Checkpoint interval in iterations");
  t->add_option("--disable-loss", tr.disable, "Disable a loss term (cyc, adv, rec, nrf); repeatable")
      ->check(CLI::IsMember({"cyc", "adv", "rec", "nrf"}));
  t->add_option("--block", tr.block, "Feature block: rca or res")->check(CLI::IsMember({"rca", "res", "residual"}));
  t->add_option("--pool", tr.pool, "Spatial-loss channel pooling: max or avg")->check(CLI::IsMember({"max", "avg"}));
  t->add_option("--seed", tr.seed, "Random seed");
  t->add_flag("--quiet", tr.quiet, "Only print the summary");

  PansharpenArgs ps;
  auto* p = app.add_subcommand("pansharpen", "Fuse one PAN / MS pair with a trained checkpoint");
  p->add_option("--checkpoint", ps.checkpoint)->required()->check(CLI::ExistingFile);
  p->add_option("--pan", ps.pan)->required()->check(CLI::ExistingFile);
  p->add_option("--ms", ps.ms)->required()->check(CLI::ExistingFile);
  p->add_option("--out", ps.out, "Fused MSR file")->required();
  p->add_option("--png", ps.png, "Optional RGB preview");

  BaselineArgs bl;
  auto* b = app.add_subcommand("baseline", "Fuse with a classical method");
  b->add_option("--method", bl.method)->required()->check(CLI::IsMember({"ihs", "brovey", "hpf", "sfim", "bicubic"}));
  b->add_option("--pan", bl.pan)->required()->check(CLI::ExistingFile);
  b->add_option("--ms", bl.ms)->required()->check(CLI::ExistingFile);
  b->add_option("--out", bl.out, "Fused MSR file")->required();
  b->add_option("--png", bl.png, "Optional RGB preview");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Metric report (JSON) for a checkpoint or a baseline");
  e->add_option("--data", ev.data, "Test manifest.json")->required()->check(CLI::ExistingFile);
  e->add_option("--mode", ev.mode, "full_scale or wald")->check(CLI::IsMember({"full_scale", "full", "wald"}));
  e->add_option("--checkpoint", ev.checkpoint)->check(CLI::ExistingFile);
  e->add_option("--method", ev.method, "ihs, brovey, hpf, sfim, bicubic or reference")
      ->check(CLI::IsMember({"ihs", "brovey", "hpf", "sfim", "bicubic", "reference"}));
  e->add_option("--out", ev.out, "Report path (stdout when omitted)");

  std::uint64_t gc_seed = 0;
  auto* g = app.add_subcommand("gradcheck", "Finite-difference check of every loss term");
  g->add_option("--seed", gc_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (s->parsed()) return run_synth(synth);
    if (w->parsed()) return run_wald(wald);
    if (t->parsed()) {
      if (list_presets) {
        for (const auto& grid : {train::loss_ablation_grid(), train::weight_sweep_grid()}) {
          for (const auto& preset : grid) std::cout << preset.name << '\n';
        }
        return 0;
      }
      if (tr.data.empty() || tr.out.empty()) throw ContractError("train needs --data and --out");
      return run_train(tr);
    }
    if (p->parsed()) return run_pansharpen(ps);
    if (b->parsed()) return run_baseline(bl);
    if (e->parsed()) return run_eval(ev);
    if (g->parsed()) return run_gradcheck(gc_seed);
  } catch (const ucgan::Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
  return 0;
}
