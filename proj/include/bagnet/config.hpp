#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bagnet/corpus.hpp"
#include "bagnet/et.hpp"
#include "bagnet/re.hpp"

namespace bagnet::cfg {

// Flat key = value run configuration. Every key has a documented default;
// unknown keys are rejected. Flags override file values.
struct RunConfig {
  std::uint64_t seed = 42;
  std::string out;          // output directory; empty -> timestamped default
  std::string corpus_dir;   // where to load/save corpus files
  int head_threshold = 100; // frequency > head -> head bucket
  int tail_threshold = 5;   // frequency < tail -> tail bucket

  data::SynthConfig synth;  // synth.seed is overwritten by `seed` at use time

  int emb_dim = 100;
  int emb_window = 5;
  std::string emb_path;     // word2vec-text import; empty -> train internally

  et::ETConfig et;
  std::string et_mode = "miml-att";  // ds | miml-* | entemb

  re::REConfig re;
  std::string re_et_predictions;  // pipeline input file

  std::string sweep_task = "et";  // et | re
  std::vector<std::uint64_t> sweep_seeds = {1, 2, 3, 4, 5};

  // Applies "key = value"; throws ConfigError for unknown keys / bad values.
  void set(const std::string& key, const std::string& value);
  // All keys in sorted order, one "key = value" line each.
  std::string snapshot() const;

  void load_file(const std::string& path);
  void save_snapshot(const std::string& path) const;

  data::SynthConfig synth_with_seed() const;
};

std::vector<std::string> known_keys();

}  // namespace bagnet::cfg
