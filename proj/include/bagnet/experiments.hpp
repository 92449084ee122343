#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "bagnet/config.hpp"
#include "bagnet/corpus.hpp"
#include "bagnet/embeddings.hpp"
#include "bagnet/et.hpp"
#include "bagnet/re.hpp"

namespace bagnet::exp {

// One fully prepared synthetic world: corpus, embeddings, split bags.
struct World {
  data::Corpus corpus;
  emb::EmbeddingTable table;
  std::vector<data::Bag> train_bags, dev_bags, test_bags;
  std::vector<const data::RelationInstance*> re_train, re_dev, re_test;
};

World make_world(const data::SynthConfig& synth, int emb_dim, int emb_window);

// Trains one ET variant ("ds", "miml-*", "entemb") and returns its dev
// micro-F1 under tuned thresholds and the prediction aggregation.
double et_dev_f1(World& world, const et::ETConfig& cfg, const std::string& variant,
                 std::uint64_t seed);

// Entity-level typing probabilities for every entity with a bag; the
// pipeline input for the type integrations.
std::unordered_map<int, std::vector<double>> pipeline_et_probs(
    World& world, const et::ETConfig& cfg, et::MimlMode mode, std::uint64_t seed);

// Trains one RE variant and returns the test PR area. Variants: "none",
// "piecewise", "entemb", "binary", "binary-hidden", "predicted-hidden",
// "weighted", "joint-train", "joint-et-entemb", "joint-dual", "joint-all-entemb".
double re_test_area(World& world, const re::REConfig& base, const std::string& variant,
                    std::uint64_t seed,
                    const std::unordered_map<int, std::vector<double>>* pipeline);

re::REConfig variant_config(const re::REConfig& base, const std::string& variant);

// Per-variant mean over seeds plus the per-seed values, cells evaluated
// in parallel up to BAGNET_THREADS workers (each cell is isolated).
struct GridResult {
  std::vector<std::string> variants;
  std::vector<std::uint64_t> seeds;
  std::map<std::string, std::vector<double>> values;  // variant -> per-seed
  std::map<std::string, double> means;
};

GridResult run_et_grid(const cfg::RunConfig& run,
                       const std::vector<std::string>& variants,
                       const std::vector<std::uint64_t>& seeds);
GridResult run_re_grid(const cfg::RunConfig& run,
                       const std::vector<std::string>& variants,
                       const std::vector<std::uint64_t>& seeds);

std::string grid_csv(const GridResult& grid);

int max_threads_from_env();  // BAGNET_THREADS, default 1

}  // namespace bagnet::exp
