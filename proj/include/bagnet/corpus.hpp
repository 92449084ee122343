#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "bagnet/rng.hpp"

namespace bagnet::data {

enum class Split { train, dev, test };

std::string split_name(Split s);
Split parse_split(const std::string& s);

struct Entity {
  std::string id;
  std::vector<int> gold_types;  // sorted unique type ids
  int notable_type = -1;        // member of gold_types
  Split split = Split::train;
  int frequency = 0;  // number of contexts in the corpus
};

// Token window around one entity mention: exactly `window` tokens on each
// side, <PAD>-filled where the sentence runs out. Other entity mentions are
// replaced by their notable-type token at load/generation time.
struct Context {
  int entity = -1;  // index into Corpus::entities
  std::vector<std::string> left;
  std::vector<std::string> right;
};

// All contexts of one entity plus its binary type labels; the MIML training
// unit. Context indices point into Corpus::contexts.
struct Bag {
  int entity = -1;
  std::vector<int> contexts;
  std::vector<std::uint8_t> labels;  // size T
};

// Three-part relation context with overlap: left ends with the e1 token,
// middle spans e1..e2 inclusive, right starts with the e2 token.
struct RelationContext {
  std::vector<std::string> left;
  std::vector<std::string> middle;
  std::vector<std::string> right;
};

struct RelationInstance {
  int e1 = -1, e2 = -1;  // indices into Corpus::entities, same split
  int relation = -1;     // index into Corpus::relations (NA included)
  std::vector<RelationContext> contexts;
};

struct Corpus {
  std::vector<std::string> types;      // index = type id
  std::vector<std::string> relations;  // index = relation id, contains "NA"
  int na_relation = -1;
  int window = 5;
  std::vector<Entity> entities;
  std::unordered_map<std::string, int> entity_index;
  std::vector<Context> contexts;
  std::vector<RelationInstance> relation_instances;

  int num_types() const { return static_cast<int>(types.size()); }
  int type_id(const std::string& name) const;
  int relation_id(const std::string& name) const;
  std::vector<std::uint8_t> label_vector(const Entity& e) const;
};

// Controls for the synthetic distant-supervision generator. Every type owns
// `triggers_per_type` dedicated vocabulary items; a context expressing a
// type carries 1-2 of its triggers. A context is filler-only with
// probability `noise_rate`, and for every (entity, gold type) at least one
// context is guaranteed to carry that type's trigger.
struct SynthConfig {
  int types = 10;
  int relations = 10;  // named relations, NA added on top
  int entities = 500;
  int contexts_min = 2;
  int contexts_max = 6;
  double noise_rate = 0.5;  // rho
  int vocab = 400;          // word tokens; type triggers are carved from this
  int triggers_per_type = 3;
  std::uint64_t seed = 1;

  // Extra knobs with defaults; -1 means "derive from the fields above".
  int window = 5;
  int pairs = -1;              // relation instances, default = entities
  int pair_contexts_min = -1;  // default = contexts_min
  int pair_contexts_max = -1;  // default = contexts_max

  void validate() const;  // throws ConfigError
};

// Loads entities.tsv, contexts.tsv, relations.tsv, types.txt, relations.txt
// from a directory. Validates the split-containment rule and replaces other
// entity mentions in windows with their notable-type token.
Corpus load_corpus(const std::string& dir);

// Canonical writer; save(load(x)) is byte-identical for canonical files.
void save_corpus(const Corpus& corpus, const std::string& dir);

Corpus generate_synthetic(const SynthConfig& cfg);

std::vector<Bag> make_bags(const Corpus& corpus, Split split);
std::vector<const RelationInstance*> relation_bags(const Corpus& corpus, Split split);

enum class Bucket { head, mid, tail };

// head iff frequency > head_min, tail iff frequency < tail_max, else mid.
Bucket frequency_bucket(const Entity& e, int head_min = 100, int tail_max = 5);

}  // namespace bagnet::data
