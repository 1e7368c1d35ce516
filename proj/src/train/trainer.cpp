#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "ucgan/error.hpp"
#include "ucgan/imaging/resample.hpp"
#include "ucgan/nn/ops.hpp"
#include "ucgan/train/train.hpp"

namespace ucgan::train {

namespace fs = std::filesystem;
using nlohmann::json;
using losses::Term;

namespace {

json optional_value(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct Terms {
  losses::LossComponents<float> components;
  nn::Tensor<float> spatial, spectral;
};

Terms compute_terms(const losses::CyclePass<float>& pass, const Batch& batch, const net::Discriminator<float>& d,
                    const losses::LossWeights& weights, losses::Pooling pooling, const imaging::FilterSpec& filter) {
  Terms t;
  if (weights.use_cyc) t.components.cyc = losses::cycle_loss(pass);
  if (weights.use_adv) {
    const losses::CriticFn<float> critic = [&d](const auto& p, const auto& l, const auto& f) { return d(p, l, f); };
    t.components.adv = losses::adv_loss_g(critic, batch.pan, pass);
  }
  if (weights.use_rec) {
    t.spatial = losses::spatial_loss(batch.pan, pass.f1, filter, pooling);
    t.spectral = losses::spectral_loss(batch.lrms, pass.f1, filter);
    t.components.rec = nn::add(t.spatial, t.spectral);
  }
  if (weights.use_nrf) t.components.nrf = losses::nrf_loss(batch.pan, batch.lrms, pass.f1, batch.pan_lr);
  return t;
}

void check_finite(double value, const std::string& term, std::size_t iteration) {
  if (!std::isfinite(value)) {
    throw TrainingError("loss term '" + term + "' is " + (std::isnan(value) ? "NaN" : "infinite") +
                        " at iteration " + std::to_string(iteration));
  }
}

std::string checkpoint_name(std::size_t iteration) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "iter_%06zu.ucgk", iteration);
  return buf;
}

double holdout_qnr(const net::Generator<float>& g, const std::vector<const data::ScenePair*>& pairs) {
  double total = 0.0;
  for (const auto* p : pairs) total += evaluate_pair(pansharpen(g, p->pan, p->lrms), *p, false).qnr;
  return total / static_cast<double>(pairs.size());
}

}  // namespace

json IterationLog::to_json() const {
  return {{"event", "iter"},          {"iter", iteration},
          {"epoch", epoch},           {"cyc", optional_value(cyc)},
          {"adv", optional_value(adv)}, {"rec", optional_value(rec)},
          {"spatial", optional_value(spatial)}, {"spectral", optional_value(spectral)},
          {"nrf", optional_value(nrf)}, {"g_total", g_total},
          {"d_loss", optional_value(d_loss)}};
}

double TrainResult::initial_qnr() const {
  if (evals.empty()) throw ContractError("training ran without held-out pairs");
  return evals.front().qnr;
}

double TrainResult::final_qnr() const {
  if (evals.empty()) throw ContractError("training ran without held-out pairs");
  return evals.back().qnr;
}

net::Generator<float> make_generator(const TrainConfig& config) {
  net::GeneratorConfig gc;
  gc.block = config.block_kind;
  gc.seed = config.seed;
  return net::Generator<float>(gc);
}

net::Discriminator<float> make_discriminator(const TrainConfig& config) {
  return net::Discriminator<float>(net::DiscriminatorConfig{config.seed + 1});
}

Batch make_batch(const std::vector<const data::ScenePair*>& pairs) {
  if (pairs.empty()) throw ContractError("make_batch: no pairs");
  std::vector<nn::Tensor<float>> pan, lrms;
  for (const auto* p : pairs) {
    pan.push_back(imaging::to_tensor<float>(p->pan));
    lrms.push_back(imaging::to_tensor<float>(p->lrms));
  }
  Batch b;
  b.pan = nn::stack_batch(pan);
  b.lrms = nn::stack_batch(lrms);
  nn::NoGradGuard no_grad;
  b.pan_lr = imaging::degrade(b.pan);
  return b;
}

losses::LossComponents<float> generator_terms(const losses::CyclePass<float>& pass, const Batch& batch,
                                              const net::Discriminator<float>& d, const losses::LossWeights& weights,
                                              losses::Pooling pooling, const imaging::FilterSpec& filter) {
  return compute_terms(pass, batch, d, weights, pooling, filter).components;
}

TrainResult train(const TrainConfig& config, const std::vector<data::ScenePair>& dataset,
                  const TrainOutputs& outputs) {
  config.validate();
  for (const auto& p : dataset) {
    p.validate();
    if (p.reference) throw ContractError("training pair " + p.id + " carries a reference image");
  }
  if (dataset.size() <= config.holdout) {
    throw ContractError("dataset of " + std::to_string(dataset.size()) + " pairs leaves nothing to train on after " +
                        std::to_string(config.holdout) + " held out");
  }
  for (const auto& p : dataset) {
    if (p.pan.width != dataset.front().pan.width || p.pan.height != dataset.front().pan.height) {
      throw ContractError("training pairs must share one patch size");
    }
  }
  const std::size_t train_count = dataset.size() - config.holdout;
  std::vector<const data::ScenePair*> held;
  for (std::size_t i = train_count; i < dataset.size(); ++i) held.push_back(&dataset[i]);

  auto g = make_generator(config);
  auto d = make_discriminator(config);
  Adam<float> adam_g(g.params(), config.adam());
  Adam<float> adam_d(d.params(), config.adam());
  std::mt19937_64 rng(config.seed + 2);
  const auto& weights = config.loss_weights;
  const auto filter = imaging::averaging_filter();

  std::ofstream log;
  if (!outputs.log_path.empty()) {
    if (outputs.log_path.has_parent_path()) fs::create_directories(outputs.log_path.parent_path());
    log.open(outputs.log_path);
    if (!log) throw Error("cannot write training log " + outputs.log_path.string());
  }
  if (!outputs.checkpoint_dir.empty()) fs::create_directories(outputs.checkpoint_dir);
  auto save = [&](const std::string& name) {
    if (!outputs.checkpoint_dir.empty()) net::save_checkpoint(outputs.checkpoint_dir / name, {&g.params(), &d.params()});
  };

  TrainResult result{{}, {}, g, d};  // shares parameter storage with g and d
  auto evaluate_holdout = [&](std::size_t epoch, std::size_t iteration) {
    if (held.empty()) return;
    EpochEval e{epoch, iteration, holdout_qnr(g, held)};
    result.evals.push_back(e);
    if (log) log << json{{"event", "eval"}, {"epoch", e.epoch}, {"iter", e.iteration}, {"qnr", e.qnr}}.dump() << '\n'
                 << std::flush;
    if (outputs.on_eval) outputs.on_eval(e);
  };
  evaluate_holdout(0, 0);

  const losses::FuseFn<float> fuse = [&g](const auto& pan, const auto& lrms) { return g(pan, lrms); };
  const losses::CriticFn<float> critic = [&d](const auto& p, const auto& l, const auto& f) { return d(p, l, f); };
  const bool need_f2_graph = weights.use_cyc || weights.use_adv;
  const std::size_t batch_size = std::min(config.batch_size, train_count);

  std::vector<std::size_t> order(train_count);
  std::size_t iteration = 0;
  auto done = [&] { return config.max_iterations > 0 && iteration >= config.max_iterations; };
  for (std::size_t epoch = 1; config.max_iterations > 0 ? !done() : epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < train_count && !done(); start += batch_size) {
      std::vector<const data::ScenePair*> items;
      for (std::size_t i = start; i < std::min(start + batch_size, train_count); ++i) items.push_back(&dataset[order[i]]);
      const Batch batch = make_batch(items);
      ++iteration;
      IterationLog rec;
      rec.iteration = iteration;
      rec.epoch = epoch;

      losses::CyclePass<float> pass;
      if (need_f2_graph) {
        pass = losses::cycle_pass(fuse, batch.pan, batch.lrms);
      } else {
        pass.f1 = g(batch.pan, batch.lrms);
        nn::NoGradGuard no_grad;
        pass.f1_down = imaging::bicubic_resize(pass.f1.detach(), imaging::kDownsample4);
        pass.f2 = g(batch.pan, pass.f1_down);
      }

      if (weights.use_adv) {
        const auto d_loss = losses::adv_loss_d(critic, batch.pan, batch.lrms, pass,
                                               losses::draw_labels(config.soft_labels, rng));
        rec.d_loss = static_cast<double>(d_loss.item());
        check_finite(*rec.d_loss, "d_loss", iteration);
        d.params().zero_grad();
        nn::backward(d_loss);
        adam_d.step();
      }

      const auto terms = compute_terms(pass, batch, d, weights, config.pooling_kind, filter);
      const auto total = losses::total_g_loss(weights, terms.components);
      if (weights.use_cyc) rec.cyc = terms.components.cyc.item();
      if (weights.use_adv) rec.adv = terms.components.adv.item();
      if (weights.use_rec) {
        rec.rec = terms.components.rec.item();
        rec.spatial = terms.spatial.item();
        rec.spectral = terms.spectral.item();
      }
      if (weights.use_nrf) rec.nrf = terms.components.nrf.item();
      {
        // Disabled terms are still logged (except adv, whose critic is not trained).
        nn::NoGradGuard no_grad;
        if (!weights.use_cyc) rec.cyc = losses::cycle_loss(pass).item();
        if (!weights.use_rec) {
          rec.spatial = losses::spatial_loss(batch.pan, pass.f1, filter, config.pooling_kind).item();
          rec.spectral = losses::spectral_loss(batch.lrms, pass.f1, filter).item();
          rec.rec = *rec.spatial + *rec.spectral;
        }
        if (!weights.use_nrf) rec.nrf = losses::nrf_loss(batch.pan, batch.lrms, pass.f1, batch.pan_lr).item();
      }
      rec.g_total = total.item();
      for (auto t : losses::kAllTerms) {
        const auto& v = t == Term::cyc ? rec.cyc : t == Term::adv ? rec.adv : t == Term::rec ? rec.rec : rec.nrf;
        if (weights.enabled(t)) check_finite(*v, losses::to_string(t), iteration);
      }
      check_finite(rec.g_total, "g_total", iteration);

      g.params().zero_grad();
      nn::backward(total);
      adam_g.step();

      if (log) log << rec.to_json().dump() << '\n' << std::flush;
      if (outputs.on_iteration) outputs.on_iteration(rec);
      result.log.push_back(rec);
      if (config.checkpoint_every > 0 && iteration % config.checkpoint_every == 0) save(checkpoint_name(iteration));
    }
    evaluate_holdout(epoch, iteration);
  }
  save("final.ucgk");
  return result;
}

}  // namespace ucgan::train
