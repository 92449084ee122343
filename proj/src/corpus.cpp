#include "bagnet/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "bagnet/errors.hpp"

namespace bagnet::data {

namespace {

constexpr const char* kPad = "<PAD>";

std::vector<std::string> split_on(const std::string& line, char sep, bool keep_empty) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  if (!keep_empty) {
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const std::string& s) { return s.empty(); }),
              out.end());
  }
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string join(const std::vector<std::string>& toks, char sep) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out.push_back(sep);
    out += toks[i];
  }
  return out;
}

// left' = left + [e1], middle' = [e1] + middle + [e2], right' = [e2] + right
RelationContext with_overlap(std::vector<std::string> left,
                             std::vector<std::string> middle,
                             std::vector<std::string> right,
                             const std::string& e1, const std::string& e2) {
  RelationContext ctx;
  ctx.left = std::move(left);
  ctx.left.push_back(e1);
  ctx.middle.reserve(middle.size() + 2);
  ctx.middle.push_back(e1);
  for (auto& tok : middle) ctx.middle.push_back(std::move(tok));
  ctx.middle.push_back(e2);
  ctx.right.reserve(right.size() + 1);
  ctx.right.push_back(e2);
  for (auto& tok : right) ctx.right.push_back(std::move(tok));
  return ctx;
}

}  // namespace

std::string split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "?";
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "dev") return Split::dev;
  if (s == "test") return Split::test;
  throw DataError("unknown split '" + s + "'");
}

int Corpus::type_id(const std::string& name) const {
  for (std::size_t i = 0; i < types.size(); ++i)
    if (types[i] == name) return static_cast<int>(i);
  return -1;
}

int Corpus::relation_id(const std::string& name) const {
  for (std::size_t i = 0; i < relations.size(); ++i)
    if (relations[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<std::uint8_t> Corpus::label_vector(const Entity& e) const {
  std::vector<std::uint8_t> labels(types.size(), 0);
  for (int t : e.gold_types) labels[static_cast<std::size_t>(t)] = 1;
  return labels;
}

void SynthConfig::validate() const {
  if (types < 2) throw ConfigError("synthetic: need at least 2 types");
  if (relations < 1) throw ConfigError("synthetic: need at least 1 relation");
  if (entities < 10) throw ConfigError("synthetic: need at least 10 entities");
  if (contexts_min < 1 || contexts_max < contexts_min)
    throw ConfigError("synthetic: invalid contexts-per-entity range");
  if (contexts_max < 3)
    throw ConfigError(
        "synthetic: contexts-per-entity max below the maximum gold-type count "
        "(3); the per-type trigger coverage guarantee cannot be satisfied");
  if (noise_rate < 0.0 || noise_rate > 1.0)
    throw ConfigError("synthetic: noise rate must be in [0,1]");
  if (triggers_per_type < 1) throw ConfigError("synthetic: need >= 1 trigger per type");
  if (vocab <= (types + relations) * triggers_per_type)
    throw ConfigError("synthetic: vocabulary too small for trigger tokens");
  if (window < 3) throw ConfigError("synthetic: window must be >= 3");
  if (pairs == 0 || pairs < -1) throw ConfigError("synthetic: invalid pair count");
}

Corpus load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  Corpus corpus;

  corpus.types = read_lines((fs::path(dir) / "types.txt").string());
  if (corpus.types.empty()) throw DataError("types.txt: no types");
  corpus.relations = read_lines((fs::path(dir) / "relations.txt").string());
  for (std::size_t i = 0; i < corpus.relations.size(); ++i)
    if (corpus.relations[i] == "NA") corpus.na_relation = static_cast<int>(i);
  if (!corpus.relations.empty() && corpus.na_relation < 0)
    throw DataError("relations.txt: missing NA relation");

  // entities.tsv: id <TAB> notable_type <TAB> gold1,gold2 <TAB> split
  const auto entity_lines = read_lines((fs::path(dir) / "entities.tsv").string());
  for (std::size_t ln = 0; ln < entity_lines.size(); ++ln) {
    if (entity_lines[ln].empty()) continue;
    const auto fields = split_on(entity_lines[ln], '\t', true);
    if (fields.size() != 4)
      throw DataError("entities.tsv:" + std::to_string(ln + 1) + ": expected 4 fields");
    Entity e;
    e.id = fields[0];
    e.notable_type = corpus.type_id(fields[1]);
    if (e.notable_type < 0)
      throw DataError("entities.tsv:" + std::to_string(ln + 1) + ": unknown type '" +
                      fields[1] + "'");
    for (const auto& name : split_on(fields[2], ',', false)) {
      const int t = corpus.type_id(name);
      if (t < 0)
        throw DataError("entities.tsv:" + std::to_string(ln + 1) + ": unknown type '" +
                        name + "'");
      e.gold_types.push_back(t);
    }
    std::sort(e.gold_types.begin(), e.gold_types.end());
    e.gold_types.erase(std::unique(e.gold_types.begin(), e.gold_types.end()),
                       e.gold_types.end());
    if (!std::binary_search(e.gold_types.begin(), e.gold_types.end(), e.notable_type))
      throw DataError("entities.tsv:" + std::to_string(ln + 1) +
                      ": notable type not among gold types");
    e.split = parse_split(fields[3]);
    if (corpus.entity_index.count(e.id))
      throw DataError("entities.tsv:" + std::to_string(ln + 1) + ": duplicate entity '" +
                      e.id + "'");
    corpus.entity_index[e.id] = static_cast<int>(corpus.entities.size());
    corpus.entities.push_back(std::move(e));
  }

  // contexts.tsv: entity_id <TAB> left tokens <TAB> right tokens
  const auto context_lines = read_lines((fs::path(dir) / "contexts.tsv").string());
  std::vector<std::string> violations;
  bool window_known = false;
  for (std::size_t ln = 0; ln < context_lines.size(); ++ln) {
    if (context_lines[ln].empty()) continue;
    const auto fields = split_on(context_lines[ln], '\t', true);
    if (fields.size() != 3)
      throw DataError("contexts.tsv:" + std::to_string(ln + 1) + ": expected 3 fields");
    auto it = corpus.entity_index.find(fields[0]);
    if (it == corpus.entity_index.end())
      throw DataError("contexts.tsv:" + std::to_string(ln + 1) + ": unknown entity '" +
                      fields[0] + "'");
    Context ctx;
    ctx.entity = it->second;
    ctx.left = split_on(fields[1], ' ', false);
    ctx.right = split_on(fields[2], ' ', false);
    if (!window_known) {
      corpus.window = static_cast<int>(ctx.left.size());
      window_known = true;
    }
    const auto w = static_cast<std::size_t>(corpus.window);
    if (ctx.left.size() != w || ctx.right.size() != w)
      throw DataError("contexts.tsv:" + std::to_string(ln + 1) + ": expected " +
                      std::to_string(corpus.window) + " tokens per side");

    // Split containment: a train context may only mention train entities and
    // a dev context only train/dev entities; then replace other entity
    // mentions with their notable-type token.
    const Split split = corpus.entities[static_cast<std::size_t>(ctx.entity)].split;
    for (auto* side : {&ctx.left, &ctx.right}) {
      for (auto& tok : *side) {
        auto eit = corpus.entity_index.find(tok);
        if (eit == corpus.entity_index.end()) continue;
        const Entity& other = corpus.entities[static_cast<std::size_t>(eit->second)];
        const bool bad = (split == Split::train && other.split != Split::train) ||
                         (split == Split::dev && other.split == Split::test);
        if (bad)
          violations.push_back("contexts.tsv:" + std::to_string(ln + 1) + ": " +
                               split_name(split) + " context mentions " +
                               split_name(other.split) + " entity '" + tok + "'");
        tok = corpus.types[static_cast<std::size_t>(other.notable_type)];
      }
    }
    corpus.entities[static_cast<std::size_t>(ctx.entity)].frequency++;
    corpus.contexts.push_back(std::move(ctx));
  }
  if (!violations.empty()) {
    std::string msg = "split containment violated:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw DataError(msg);
  }
  if (corpus.contexts.empty() && !corpus.entities.empty())
    std::cerr << "warning: corpus has entities but zero contexts (no bags)\n";

  // relations.tsv: e1 <TAB> e2 <TAB> relation <TAB> left <TAB> middle <TAB> right
  const fs::path rel_path = fs::path(dir) / "relations.tsv";
  if (fs::exists(rel_path)) {
    const auto rel_lines = read_lines(rel_path.string());
    std::unordered_map<std::string, std::size_t> pair_index;
    for (std::size_t ln = 0; ln < rel_lines.size(); ++ln) {
      if (rel_lines[ln].empty()) continue;
      const auto fields = split_on(rel_lines[ln], '\t', true);
      if (fields.size() != 6)
        throw DataError("relations.tsv:" + std::to_string(ln + 1) + ": expected 6 fields");
      const auto e1 = corpus.entity_index.find(fields[0]);
      const auto e2 = corpus.entity_index.find(fields[1]);
      if (e1 == corpus.entity_index.end() || e2 == corpus.entity_index.end())
        throw DataError("relations.tsv:" + std::to_string(ln + 1) + ": unknown entity");
      const int rel = corpus.relation_id(fields[2]);
      if (rel < 0)
        throw DataError("relations.tsv:" + std::to_string(ln + 1) + ": unknown relation '" +
                        fields[2] + "'");
      const Entity& a = corpus.entities[static_cast<std::size_t>(e1->second)];
      const Entity& b = corpus.entities[static_cast<std::size_t>(e2->second)];
      if (a.split != b.split)
        throw DataError("relations.tsv:" + std::to_string(ln + 1) +
                        ": entity pair spans splits (" + split_name(a.split) + "/" +
                        split_name(b.split) + ")");

      const std::string key = fields[0] + "\t" + fields[1];
      auto pit = pair_index.find(key);
      if (pit == pair_index.end()) {
        RelationInstance inst;
        inst.e1 = e1->second;
        inst.e2 = e2->second;
        inst.relation = rel;
        pair_index[key] = corpus.relation_instances.size();
        corpus.relation_instances.push_back(std::move(inst));
        pit = pair_index.find(key);
      } else if (corpus.relation_instances[pit->second].relation != rel) {
        throw DataError("relations.tsv:" + std::to_string(ln + 1) +
                        ": conflicting relation for pair " + key);
      }
      corpus.relation_instances[pit->second].contexts.push_back(
          with_overlap(split_on(fields[3], ' ', false), split_on(fields[4], ' ', false),
                       split_on(fields[5], ' ', false), fields[0], fields[1]));
    }
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  {
    std::ofstream out(fs::path(dir) / "types.txt");
    for (const auto& t : corpus.types) out << t << "\n";
  }
  {
    std::ofstream out(fs::path(dir) / "relations.txt");
    for (const auto& r : corpus.relations) out << r << "\n";
  }
  {
    std::ofstream out(fs::path(dir) / "entities.tsv");
    for (const Entity& e : corpus.entities) {
      std::vector<std::string> gold;
      for (int t : e.gold_types) gold.push_back(corpus.types[static_cast<std::size_t>(t)]);
      out << e.id << "\t" << corpus.types[static_cast<std::size_t>(e.notable_type)] << "\t"
          << join(gold, ',') << "\t" << split_name(e.split) << "\n";
    }
  }
  {
    std::ofstream out(fs::path(dir) / "contexts.tsv");
    for (const Context& c : corpus.contexts) {
      out << corpus.entities[static_cast<std::size_t>(c.entity)].id << "\t"
          << join(c.left, ' ') << "\t" << join(c.right, ' ') << "\n";
    }
  }
  {
    std::ofstream out(fs::path(dir) / "relations.tsv");
    for (const RelationInstance& inst : corpus.relation_instances) {
      const std::string& id1 = corpus.entities[static_cast<std::size_t>(inst.e1)].id;
      const std::string& id2 = corpus.entities[static_cast<std::size_t>(inst.e2)].id;
      for (const RelationContext& ctx : inst.contexts) {
        // Strip the overlap the loader adds back.
        std::vector<std::string> left(ctx.left.begin(), ctx.left.end() - 1);
        std::vector<std::string> middle(ctx.middle.begin() + 1, ctx.middle.end() - 1);
        std::vector<std::string> right(ctx.right.begin() + 1, ctx.right.end());
        out << id1 << "\t" << id2 << "\t"
            << corpus.relations[static_cast<std::size_t>(inst.relation)] << "\t"
            << join(left, ' ') << "\t" << join(middle, ' ') << "\t" << join(right, ' ')
            << "\n";
      }
    }
  }
}

Corpus generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng = Rng::stream(cfg.seed, "corpus");
  Corpus corpus;
  corpus.window = cfg.window;

  auto pad_num = [](int v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
  };

  for (int t = 0; t < cfg.types; ++t) corpus.types.push_back("type" + pad_num(t, 2));
  for (int r = 0; r < cfg.relations; ++r)
    corpus.relations.push_back("rel" + pad_num(r, 2));
  corpus.relations.push_back("NA");
  corpus.na_relation = cfg.relations;

  // First types*k word tokens are type triggers, the next relations*k are
  // relation triggers, the rest is filler.
  const int k = cfg.triggers_per_type;
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(cfg.vocab));
  for (int i = 0; i < cfg.vocab; ++i) words.push_back("w" + pad_num(i, 4));
  const int filler_base = (cfg.types + cfg.relations) * k;
  auto type_trigger = [&](int t, int j) { return words[static_cast<std::size_t>(t * k + j)]; };
  auto rel_trigger = [&](int r, int j) {
    return words[static_cast<std::size_t>((cfg.types + r) * k + j)];
  };
  auto filler = [&](Rng& r) {
    return words[static_cast<std::size_t>(filler_base) +
                 r.uniform_index(words.size() - static_cast<std::size_t>(filler_base))];
  };

  // Entities: 1-3 gold types, notable type among them, 50/20/30 split.
  std::vector<int> order(static_cast<std::size_t>(cfg.entities));
  for (int i = 0; i < cfg.entities; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  const int n_train = cfg.entities / 2;
  const int n_dev = cfg.entities / 5;
  std::vector<Split> split_of(static_cast<std::size_t>(cfg.entities));
  for (int i = 0; i < cfg.entities; ++i) {
    const int pos = order[static_cast<std::size_t>(i)];
    split_of[static_cast<std::size_t>(i)] =
        pos < n_train ? Split::train : (pos < n_train + n_dev ? Split::dev : Split::test);
  }
  for (int i = 0; i < cfg.entities; ++i) {
    Entity e;
    e.id = "e" + pad_num(i, 4);
    const int g = rng.uniform_int(1, 3);
    std::set<int> gold;
    while (static_cast<int>(gold.size()) < g)
      gold.insert(static_cast<int>(rng.uniform_index(static_cast<std::size_t>(cfg.types))));
    e.gold_types.assign(gold.begin(), gold.end());
    e.notable_type = e.gold_types[rng.uniform_index(e.gold_types.size())];
    e.split = split_of[static_cast<std::size_t>(i)];
    corpus.entity_index[e.id] = i;
    corpus.entities.push_back(std::move(e));
  }

  // Contexts. A trigger context expresses a uniformly chosen non-empty
  // subset of the entity's gold types by planting 1-2 trigger tokens per
  // expressed type; a filler context (probability noise_rate) expresses
  // nothing. Afterwards the coverage pass guarantees at least one trigger
  // context for every (entity, gold type).
  const int w2 = 2 * cfg.window;
  for (int i = 0; i < cfg.entities; ++i) {
    Entity& e = corpus.entities[static_cast<std::size_t>(i)];
    const int g = static_cast<int>(e.gold_types.size());
    const int q = rng.uniform_int(std::max(g, cfg.contexts_min), cfg.contexts_max);
    const std::size_t first_ctx = corpus.contexts.size();
    std::vector<bool> carries(static_cast<std::size_t>(q) * e.gold_types.size(), false);
    auto carries_at = [&](int ctx, int gi) -> std::vector<bool>::reference {
      return carries[static_cast<std::size_t>(ctx) * e.gold_types.size() +
                     static_cast<std::size_t>(gi)];
    };

    std::vector<bool> is_filler(static_cast<std::size_t>(q), false);
    for (int c = 0; c < q; ++c) {
      std::vector<std::string> tokens;
      tokens.reserve(static_cast<std::size_t>(w2));
      for (int j = 0; j < w2; ++j) tokens.push_back(filler(rng));
      if (rng.bernoulli(cfg.noise_rate)) {
        is_filler[static_cast<std::size_t>(c)] = true;
      } else {
        const int subset = rng.uniform_int(1, g);
        auto chosen = rng.sample_indices(static_cast<std::size_t>(g),
                                         static_cast<std::size_t>(subset));
        std::vector<std::pair<int, int>> plants;  // (type, trigger)
        for (std::size_t gi : chosen) {
          const int t = e.gold_types[gi];
          const int n_trig = rng.uniform_int(1, 2);
          for (int j = 0; j < n_trig; ++j)
            plants.emplace_back(t, rng.uniform_int(0, k - 1));
          carries_at(c, static_cast<int>(gi)) = true;
        }
        auto positions = rng.sample_indices(static_cast<std::size_t>(w2), plants.size());
        for (std::size_t j = 0; j < plants.size(); ++j)
          tokens[positions[j]] = type_trigger(plants[j].first, plants[j].second);
      }
      Context ctx;
      ctx.entity = i;
      ctx.left.assign(tokens.begin(), tokens.begin() + cfg.window);
      ctx.right.assign(tokens.begin() + cfg.window, tokens.end());
      corpus.contexts.push_back(std::move(ctx));
    }

    // Coverage pass: each uncovered gold type gets the first still-filler
    // context; if none is left, the first context gains an extra trigger.
    for (int gi = 0; gi < g; ++gi) {
      bool covered = false;
      for (int c = 0; c < q && !covered; ++c) covered = carries_at(c, gi);
      if (covered) continue;
      int target = -1;
      for (int c = 0; c < q; ++c) {
        if (is_filler[static_cast<std::size_t>(c)]) {
          target = c;
          break;
        }
      }
      if (target < 0) target = gi % q;
      is_filler[static_cast<std::size_t>(target)] = false;
      carries_at(target, gi) = true;
      Context& ctx = corpus.contexts[first_ctx + static_cast<std::size_t>(target)];
      const int n_trig = rng.uniform_int(1, 2);
      auto positions = rng.sample_indices(static_cast<std::size_t>(w2),
                                          static_cast<std::size_t>(n_trig));
      for (int j = 0; j < n_trig; ++j) {
        const std::size_t pos = positions[static_cast<std::size_t>(j)];
        const std::string tok = type_trigger(e.gold_types[gi], rng.uniform_int(0, k - 1));
        const auto w = static_cast<std::size_t>(cfg.window);
        if (pos < w)
          ctx.left[pos] = tok;
        else
          ctx.right[pos - w] = tok;
      }
    }
    e.frequency = q;
  }

  // Relations. Each named relation is tied to an argument-type signature;
  // signatures are shared between pairs of relations so that argument types
  // alone cannot identify the relation, and NA pairs draw a signature too so
  // types alone cannot rule a relation out. Only the middle trigger settles
  // it.
  std::vector<int> usable_types;
  for (int t = 0; t < cfg.types; ++t) {
    bool in_all = true;
    for (Split s : {Split::train, Split::dev, Split::test}) {
      bool found = false;
      for (const Entity& e : corpus.entities)
        if (e.split == s &&
            std::binary_search(e.gold_types.begin(), e.gold_types.end(), t)) {
          found = true;
          break;
        }
      if (!found) in_all = false;
    }
    if (in_all) usable_types.push_back(t);
  }
  if (usable_types.size() < 2)
    throw ConfigError("synthetic: too few types present in every split");

  const int pool_size = std::max(1, (cfg.relations + 1) / 2);
  std::vector<std::pair<int, int>> signatures;
  for (int p = 0; p < pool_size; ++p)
    signatures.emplace_back(usable_types[rng.uniform_index(usable_types.size())],
                            usable_types[rng.uniform_index(usable_types.size())]);

  std::vector<std::vector<std::vector<int>>> by_split_type(
      3, std::vector<std::vector<int>>(static_cast<std::size_t>(cfg.types)));
  for (int i = 0; i < cfg.entities; ++i) {
    const Entity& e = corpus.entities[static_cast<std::size_t>(i)];
    for (int t : e.gold_types)
      by_split_type[static_cast<std::size_t>(e.split)][static_cast<std::size_t>(t)]
          .push_back(i);
  }

  const int n_pairs = cfg.pairs < 0 ? cfg.entities : cfg.pairs;
  const int pcmin = cfg.pair_contexts_min < 0 ? cfg.contexts_min : cfg.pair_contexts_min;
  const int pcmax = cfg.pair_contexts_max < 0 ? cfg.contexts_max : cfg.pair_contexts_max;
  const int p_train = n_pairs / 2;
  const int p_dev = n_pairs / 5;
  std::set<std::pair<int, int>> used_pairs;
  for (int p = 0; p < n_pairs; ++p) {
    const Split split =
        p < p_train ? Split::train : (p < p_train + p_dev ? Split::dev : Split::test);
    const int rel = rng.uniform_int(0, cfg.relations);  // relations == NA id
    const auto& sig = signatures[static_cast<std::size_t>(
        rel == corpus.na_relation ? static_cast<int>(rng.uniform_index(signatures.size()))
                                  : rel % pool_size)];
    const auto& cands1 =
        by_split_type[static_cast<std::size_t>(split)][static_cast<std::size_t>(sig.first)];
    const auto& cands2 =
        by_split_type[static_cast<std::size_t>(split)][static_cast<std::size_t>(sig.second)];

    RelationInstance inst;
    inst.relation = rel;
    bool placed = false;
    for (int attempt = 0; attempt < 20 && !placed; ++attempt) {
      const int a = cands1[rng.uniform_index(cands1.size())];
      const int b = cands2[rng.uniform_index(cands2.size())];
      if (a == b || used_pairs.count({a, b})) continue;
      inst.e1 = a;
      inst.e2 = b;
      used_pairs.insert({a, b});
      placed = true;
    }
    if (!placed) continue;  // duplicate-saturated corner, skip this pair

    const std::string& id1 = corpus.entities[static_cast<std::size_t>(inst.e1)].id;
    const std::string& id2 = corpus.entities[static_cast<std::size_t>(inst.e2)].id;
    const int q = rng.uniform_int(pcmin, pcmax);
    int trigger_contexts = 0;
    for (int c = 0; c < q; ++c) {
      auto span = [&](int lo, int hi) {
        std::vector<std::string> s;
        const int len = rng.uniform_int(lo, hi);
        for (int j = 0; j < len; ++j) s.push_back(filler(rng));
        return s;
      };
      std::vector<std::string> left = span(1, 3);
      std::vector<std::string> middle = span(1, 3);
      std::vector<std::string> right = span(1, 3);
      if (rel != corpus.na_relation && !rng.bernoulli(cfg.noise_rate)) {
        middle[rng.uniform_index(middle.size())] =
            rel_trigger(rel, rng.uniform_int(0, k - 1));
        ++trigger_contexts;
      }
      inst.contexts.push_back(with_overlap(std::move(left), std::move(middle),
                                           std::move(right), id1, id2));
    }
    if (rel != corpus.na_relation && trigger_contexts == 0) {
      // Coverage guarantee for the gold relation.
      RelationContext& ctx = inst.contexts[0];
      ctx.middle[1 + rng.uniform_index(ctx.middle.size() - 2)] =
          rel_trigger(rel, rng.uniform_int(0, k - 1));
    }
    corpus.relation_instances.push_back(std::move(inst));
  }

  return corpus;
}

std::vector<Bag> make_bags(const Corpus& corpus, Split split) {
  std::vector<Bag> bags(corpus.entities.size());
  for (std::size_t ci = 0; ci < corpus.contexts.size(); ++ci) {
    const int e = corpus.contexts[ci].entity;
    bags[static_cast<std::size_t>(e)].contexts.push_back(static_cast<int>(ci));
  }
  std::vector<Bag> out;
  for (std::size_t i = 0; i < corpus.entities.size(); ++i) {
    const Entity& e = corpus.entities[i];
    if (e.split != split || bags[i].contexts.empty()) continue;
    bags[i].entity = static_cast<int>(i);
    bags[i].labels = corpus.label_vector(e);
    out.push_back(std::move(bags[i]));
  }
  return out;
}

std::vector<const RelationInstance*> relation_bags(const Corpus& corpus, Split split) {
  std::vector<const RelationInstance*> out;
  for (const RelationInstance& inst : corpus.relation_instances) {
    if (corpus.entities[static_cast<std::size_t>(inst.e1)].split == split &&
        !inst.contexts.empty())
      out.push_back(&inst);
  }
  return out;
}

Bucket frequency_bucket(const Entity& e, int head_min, int tail_max) {
  if (e.frequency > head_min) return Bucket::head;
  if (e.frequency < tail_max) return Bucket::tail;
  return Bucket::mid;
}

}  // namespace bagnet::data
