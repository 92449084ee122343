#include "bagnet/experiments.hpp"

#include <atomic>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "bagnet/errors.hpp"
#include "bagnet/numerics.hpp"

namespace bagnet::exp {

World make_world(const data::SynthConfig& synth, int emb_dim, int emb_window) {
  World world;
  world.corpus = data::generate_synthetic(synth);
  const auto stream =
      emb::duplicate_with_types(world.corpus, emb::sentence_stream(world.corpus));
  world.table = emb::train_embeddings(world.corpus, stream, emb_dim, emb_window);
  world.train_bags = data::make_bags(world.corpus, data::Split::train);
  world.dev_bags = data::make_bags(world.corpus, data::Split::dev);
  world.test_bags = data::make_bags(world.corpus, data::Split::test);
  world.re_train = data::relation_bags(world.corpus, data::Split::train);
  world.re_dev = data::relation_bags(world.corpus, data::Split::dev);
  world.re_test = data::relation_bags(world.corpus, data::Split::test);
  return world;
}

double et_dev_f1(World& world, const et::ETConfig& cfg, const std::string& variant,
                 std::uint64_t seed) {
  eval::TypingPredictions dev_preds;
  if (variant == "entemb") {
    et::EntEmbModel model(&world.corpus, &world.table, cfg.hidden, seed);
    model.lr = cfg.lr;
    model.max_epochs = cfg.max_epochs;
    model.patience = cfg.patience;
    train_entemb(model, world.corpus, seed);
    std::vector<int> dev_entities;
    for (const data::Bag& bag : world.dev_bags) dev_entities.push_back(bag.entity);
    dev_preds = predict_entities(model, dev_entities);
  } else {
    et::ETModel model(&world.corpus, &world.table, cfg, et::parse_mode(variant), seed);
    et::train_et(model, world.corpus, world.train_bags, world.dev_bags, seed);
    dev_preds = et::predict_bags(model, world.dev_bags);
  }
  const auto thresholds = eval::tune_thresholds(world.corpus, dev_preds);
  return eval::micro_f1(world.corpus, dev_preds, thresholds);
}

std::unordered_map<int, std::vector<double>> pipeline_et_probs(
    World& world, const et::ETConfig& cfg, et::MimlMode mode, std::uint64_t seed) {
  et::ETModel model(&world.corpus, &world.table, cfg, mode, seed);
  et::train_et(model, world.corpus, world.train_bags, world.dev_bags, seed);
  std::unordered_map<int, std::vector<double>> probs;
  for (const auto* bags : {&world.train_bags, &world.dev_bags, &world.test_bags}) {
    const auto preds = et::predict_bags(model, *bags);
    for (std::size_t i = 0; i < preds.entities.size(); ++i)
      probs[preds.entities[i]] = preds.probs[i];
  }
  return probs;
}

re::REConfig variant_config(const re::REConfig& base, const std::string& variant) {
  re::REConfig cfg = base;
  cfg.encoder = re::REEncoder::contextwise;
  cfg.integration = re::TypeIntegration::none;
  cfg.joint_et = re::JointEtKind::context_mlp;
  if (variant == "none") {
  } else if (variant == "piecewise") {
    cfg.encoder = re::REEncoder::piecewise;
  } else if (variant == "entemb") {
    cfg.encoder = re::REEncoder::entemb;
  } else if (variant == "joint-train") {
    cfg.integration = re::TypeIntegration::joint_train;
  } else if (variant == "joint-et-entemb") {
    cfg.integration = re::TypeIntegration::joint_train;
    cfg.joint_et = re::JointEtKind::entemb;
  } else if (variant == "joint-dual") {
    cfg.integration = re::TypeIntegration::joint_train;
    cfg.joint_et = re::JointEtKind::dual;
  } else if (variant == "joint-all-entemb") {
    cfg.encoder = re::REEncoder::entemb;
    cfg.integration = re::TypeIntegration::joint_train;
    cfg.joint_et = re::JointEtKind::entemb;
  } else {
    cfg.integration = re::parse_integration(variant);
  }
  return cfg;
}

double re_test_area(World& world, const re::REConfig& base, const std::string& variant,
                    std::uint64_t seed,
                    const std::unordered_map<int, std::vector<double>>* pipeline) {
  const re::REConfig cfg = variant_config(base, variant);
  re::REModel model(&world.corpus, &world.table, cfg, seed);
  const bool needs_pipeline = cfg.integration != re::TypeIntegration::none &&
                              cfg.integration != re::TypeIntegration::joint_train;
  if (needs_pipeline) {
    if (!pipeline) throw ConfigError("variant '" + variant + "' needs ET predictions");
    model.set_pipeline_probs(*pipeline);
  }
  re::train_re(model, world.corpus, world.re_train, world.re_dev, seed);
  const auto scores = re::pair_scores(model, world.re_test);
  return eval::pr_curve(scores, world.re_test, world.corpus.na_relation).area;
}

int max_threads_from_env() {
  const char* env = std::getenv("BAGNET_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

namespace {

// Runs one job per (variant, seed) cell on up to max_threads workers.
void run_cells(std::size_t cell_count, const std::function<void(std::size_t)>& job) {
  const int threads = std::min<int>(max_threads_from_env(),
                                    static_cast<int>(cell_count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < cell_count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (std::size_t i = next.fetch_add(1); i < cell_count; i = next.fetch_add(1))
          job(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

GridResult run_et_grid(const cfg::RunConfig& run,
                       const std::vector<std::string>& variants,
                       const std::vector<std::uint64_t>& seeds) {
  GridResult grid;
  grid.variants = variants;
  grid.seeds = seeds;
  for (const auto& v : variants)
    grid.values[v].assign(seeds.size(), 0.0);

  // One world per seed, shared by all variants of that seed.
  std::vector<World> worlds(seeds.size());
  run_cells(seeds.size(), [&](std::size_t si) {
    data::SynthConfig synth = run.synth;
    synth.seed = seeds[si];
    worlds[si] = make_world(synth, run.emb_dim, run.emb_window);
  });

  const std::size_t cells = variants.size() * seeds.size();
  run_cells(cells, [&](std::size_t cell) {
    const std::size_t vi = cell / seeds.size();
    const std::size_t si = cell % seeds.size();
    // Each cell trains its own model on the shared immutable world.
    World& world = worlds[si];
    grid.values[variants[vi]][si] = et_dev_f1(world, run.et, variants[vi], seeds[si]);
  });

  for (const auto& v : variants)
    grid.means[v] = exact_sum(grid.values[v]) / static_cast<double>(seeds.size());
  return grid;
}

GridResult run_re_grid(const cfg::RunConfig& run,
                       const std::vector<std::string>& variants,
                       const std::vector<std::uint64_t>& seeds) {
  GridResult grid;
  grid.variants = variants;
  grid.seeds = seeds;
  for (const auto& v : variants) grid.values[v].assign(seeds.size(), 0.0);

  bool needs_pipeline = false;
  for (const auto& v : variants) {
    const auto cfg = variant_config(run.re, v);
    needs_pipeline = needs_pipeline ||
                     (cfg.integration != re::TypeIntegration::none &&
                      cfg.integration != re::TypeIntegration::joint_train);
  }

  std::vector<World> worlds(seeds.size());
  std::vector<std::unordered_map<int, std::vector<double>>> pipelines(seeds.size());
  run_cells(seeds.size(), [&](std::size_t si) {
    data::SynthConfig synth = run.synth;
    synth.seed = seeds[si];
    worlds[si] = make_world(synth, run.emb_dim, run.emb_window);
    if (needs_pipeline)
      pipelines[si] = pipeline_et_probs(worlds[si], run.et, et::parse_mode(run.et_mode), seeds[si]);
  });

  const std::size_t cells = variants.size() * seeds.size();
  run_cells(cells, [&](std::size_t cell) {
    const std::size_t vi = cell / seeds.size();
    const std::size_t si = cell % seeds.size();
    grid.values[variants[vi]][si] = re_test_area(
        worlds[si], run.re, variants[vi], seeds[si],
        pipelines[si].empty() ? nullptr : &pipelines[si]);
  });

  for (const auto& v : variants)
    grid.means[v] = exact_sum(grid.values[v]) / static_cast<double>(seeds.size());
  return grid;
}

std::string grid_csv(const GridResult& grid) {
  std::ostringstream out;
  out << "variant";
  for (std::uint64_t s : grid.seeds) out << ",seed" << s;
  out << ",mean\n";
  char buf[48];
  for (const auto& v : grid.variants) {
    out << v;
    for (double x : grid.values.at(v)) {
      std::snprintf(buf, sizeof(buf), "%.6f", x);
      out << "," << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.6f", grid.means.at(v));
    out << "," << buf << "\n";
  }
  return out.str();
}

}  // namespace bagnet::exp
