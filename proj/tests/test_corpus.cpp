#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "bagnet/corpus.hpp"
#include "bagnet/errors.hpp"

using namespace bagnet;
using namespace bagnet::data;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           fs::path("bagnet_corpus_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  void write(const std::string& name, const std::string& content) const {
    std::ofstream out(path / name);
    out << content;
  }
  std::string str() const { return path.string(); }
};

void write_minimal(const TempDir& dir, const std::string& contexts,
                   const std::string& entities =
                       "e1\ttypeA\ttypeA,typeB\ttrain\n"
                       "e2\ttypeB\ttypeB\ttest\n") {
  dir.write("types.txt", "typeA\ntypeB\n");
  dir.write("relations.txt", "relX\nNA\n");
  dir.write("entities.tsv", entities);
  dir.write("contexts.tsv", contexts);
  dir.write("relations.tsv", "");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_dir_contents(const fs::path& a, const fs::path& b) {
  for (const char* name :
       {"types.txt", "relations.txt", "entities.tsv", "contexts.tsv", "relations.tsv"}) {
    if (read_file(a / name) != read_file(b / name)) return false;
  }
  return true;
}

// Trigger tokens for a type, by the generator's vocabulary layout.
std::set<std::string> type_triggers(const SynthConfig& cfg, int t) {
  std::set<std::string> out;
  for (int j = 0; j < cfg.triggers_per_type; ++j) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%04d", t * cfg.triggers_per_type + j);
    out.insert(buf);
  }
  return out;
}

bool context_carries(const Context& ctx, const std::set<std::string>& triggers) {
  for (const auto* side : {&ctx.left, &ctx.right})
    for (const auto& tok : *side)
      if (triggers.count(tok)) return true;
  return false;
}

}  // namespace

TEST_CASE("fixture with one entity and two contexts loads into one bag") {
  TempDir dir;
  write_minimal(dir,
                "e1\ta b c d e\tf g h i j\n"
                "e1\tk l m n o\tp q r s t\n"
                "e2\ta a a a a\tb b b b b\n");
  const Corpus corpus = load_corpus(dir.str());
  CHECK(corpus.entities.size() == 2);
  CHECK(corpus.contexts.size() == 3);
  const auto bags = make_bags(corpus, Split::train);
  REQUIRE(bags.size() == 1);
  CHECK(bags[0].contexts.size() == 2);
  CHECK(bags[0].labels == std::vector<std::uint8_t>{1, 1});
  CHECK(corpus.entities[0].frequency == 2);
}

TEST_CASE("empty context file yields entities but zero bags") {
  TempDir dir;
  write_minimal(dir, "");
  const Corpus corpus = load_corpus(dir.str());
  CHECK(corpus.entities.size() == 2);
  CHECK(make_bags(corpus, Split::train).empty());
}

TEST_CASE("test entity inside a train context violates containment") {
  TempDir dir;
  write_minimal(dir, "e1\ta e2 c d e\tf g h i j\n");
  CHECK_THROWS_AS(load_corpus(dir.str()), DataError);
}

TEST_CASE("train entity inside a test context is allowed and replaced") {
  TempDir dir;
  write_minimal(dir, "e2\ta e1 c d e\tf g h i j\n");
  const Corpus corpus = load_corpus(dir.str());
  // e1's mention is replaced by its notable type.
  CHECK(corpus.contexts[0].left[1] == "typeA");
}

TEST_CASE("malformed lines carry their line number") {
  TempDir dir;
  write_minimal(dir, "e1\tonly one field\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir.str()), doctest::Contains("contexts.tsv:1"),
                       DataError);

  TempDir dir2;
  write_minimal(dir2, "e1\ta b c d\te f g h\n");  // four tokens per side, not five
  CHECK_THROWS_AS(load_corpus(dir2.str()), DataError);

  TempDir dir3;
  write_minimal(dir3, "", "e1\ttypeB\ttypeA\ttrain\n");  // notable not in gold
  CHECK_THROWS_WITH_AS(load_corpus(dir3.str()), doctest::Contains("notable"), DataError);
}

TEST_CASE("relation spans get the argument overlap applied and stripped") {
  TempDir dir;
  write_minimal(dir,
                "e1\ta b c d e\tf g h i j\n"
                "e3\ta b c d e\tf g h i j\n",
                "e1\ttypeA\ttypeA\ttrain\ne3\ttypeB\ttypeB\ttrain\n");
  dir.write("relations.tsv", "e1\te3\trelX\tu v\tw\tx y\n");
  const Corpus corpus = load_corpus(dir.str());
  REQUIRE(corpus.relation_instances.size() == 1);
  const RelationContext& ctx = corpus.relation_instances[0].contexts[0];
  CHECK(ctx.left == std::vector<std::string>{"u", "v", "e1"});
  CHECK(ctx.middle == std::vector<std::string>{"e1", "w", "e3"});
  CHECK(ctx.right == std::vector<std::string>{"e3", "x", "y"});

  TempDir dir2;
  save_corpus(corpus, dir2.str());
  CHECK(same_dir_contents(dir.path, dir2.path));
}

TEST_CASE("pairs spanning splits are rejected") {
  TempDir dir;
  write_minimal(dir, "e1\ta b c d e\tf g h i j\n");
  dir.write("relations.tsv", "e1\te2\trelX\tu\tw\tx\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir.str()), doctest::Contains("spans splits"),
                       DataError);
}

TEST_CASE("frequency buckets follow the head/tail thresholds") {
  Entity e;
  e.frequency = 101;
  CHECK(frequency_bucket(e) == Bucket::head);
  e.frequency = 4;
  CHECK(frequency_bucket(e) == Bucket::tail);
  e.frequency = 50;
  CHECK(frequency_bucket(e) == Bucket::mid);
  e.frequency = 100;
  CHECK(frequency_bucket(e) == Bucket::mid);  // head needs strictly more
  e.frequency = 5;
  CHECK(frequency_bucket(e) == Bucket::mid);
  CHECK(frequency_bucket(e, 3, 1) == Bucket::head);  // thresholds configurable
}

TEST_CASE("synthetic generation is deterministic under the seed") {
  SynthConfig cfg;
  cfg.entities = 40;
  cfg.types = 4;
  cfg.vocab = 120;
  cfg.seed = 7;
  const Corpus a = generate_synthetic(cfg);
  const Corpus b = generate_synthetic(cfg);
  TempDir da, db;
  save_corpus(a, da.str());
  save_corpus(b, db.str());
  CHECK(same_dir_contents(da.path, db.path));

  cfg.seed = 8;
  const Corpus c = generate_synthetic(cfg);
  TempDir dc;
  save_corpus(c, dc.str());
  CHECK(!same_dir_contents(da.path, dc.path));
}

TEST_CASE("synthetic round-trip through save and load is byte-identical") {
  SynthConfig cfg;
  cfg.entities = 30;
  cfg.types = 3;
  cfg.vocab = 100;
  cfg.seed = 3;
  const Corpus corpus = generate_synthetic(cfg);
  TempDir first, second;
  save_corpus(corpus, first.str());
  const Corpus reloaded = load_corpus(first.str());
  save_corpus(reloaded, second.str());
  CHECK(same_dir_contents(first.path, second.path));
  CHECK(reloaded.window == corpus.window);
  CHECK(reloaded.na_relation == corpus.na_relation);
}

TEST_CASE("noise-free corpus: every context expresses a gold type") {
  SynthConfig cfg;
  cfg.entities = 50;
  cfg.types = 5;
  cfg.vocab = 150;
  cfg.noise_rate = 0.0;
  cfg.seed = 11;
  const Corpus corpus = generate_synthetic(cfg);
  for (const Context& ctx : corpus.contexts) {
    const Entity& e = corpus.entities[static_cast<std::size_t>(ctx.entity)];
    bool expresses = false;
    for (int t : e.gold_types)
      expresses = expresses || context_carries(ctx, type_triggers(cfg, t));
    CHECK(expresses);
  }
}

TEST_CASE("full noise: exactly one trigger context per entity-type pair") {
  SynthConfig cfg;
  cfg.entities = 50;
  cfg.types = 5;
  cfg.vocab = 150;
  cfg.noise_rate = 1.0;
  cfg.seed = 13;
  const Corpus corpus = generate_synthetic(cfg);
  std::vector<std::vector<const Context*>> by_entity(corpus.entities.size());
  for (const Context& ctx : corpus.contexts)
    by_entity[static_cast<std::size_t>(ctx.entity)].push_back(&ctx);
  for (std::size_t ei = 0; ei < corpus.entities.size(); ++ei) {
    const Entity& e = corpus.entities[ei];
    for (int t : e.gold_types) {
      int carrying = 0;
      for (const Context* ctx : by_entity[ei])
        if (context_carries(*ctx, type_triggers(cfg, t))) ++carrying;
      CHECK(carrying == 1);
    }
  }
}

TEST_CASE("coverage guarantee holds for every entity-gold-type pair") {
  SynthConfig cfg;
  cfg.entities = 60;
  cfg.types = 6;
  cfg.vocab = 200;
  cfg.noise_rate = 0.6;
  cfg.seed = 17;
  const Corpus corpus = generate_synthetic(cfg);
  std::vector<std::vector<const Context*>> by_entity(corpus.entities.size());
  for (const Context& ctx : corpus.contexts)
    by_entity[static_cast<std::size_t>(ctx.entity)].push_back(&ctx);
  for (std::size_t ei = 0; ei < corpus.entities.size(); ++ei) {
    for (int t : corpus.entities[ei].gold_types) {
      bool covered = false;
      for (const Context* ctx : by_entity[ei])
        covered = covered || context_carries(*ctx, type_triggers(cfg, t));
      CHECK(covered);
    }
  }
}

TEST_CASE("filler fraction converges to the noise rate") {
  SynthConfig cfg;
  cfg.entities = 150;
  cfg.types = 6;
  cfg.vocab = 200;
  cfg.contexts_min = 60;
  cfg.contexts_max = 80;
  cfg.noise_rate = 0.5;
  cfg.pairs = 10;  // keep the relation side small
  cfg.seed = 19;
  const Corpus corpus = generate_synthetic(cfg);
  REQUIRE(corpus.contexts.size() >= 10000);
  std::size_t filler = 0;
  for (const Context& ctx : corpus.contexts) {
    const Entity& e = corpus.entities[static_cast<std::size_t>(ctx.entity)];
    bool expresses = false;
    for (int t : e.gold_types)
      expresses = expresses || context_carries(ctx, type_triggers(cfg, t));
    if (!expresses) ++filler;
  }
  const double fraction =
      static_cast<double>(filler) / static_cast<double>(corpus.contexts.size());
  CHECK(std::fabs(fraction - cfg.noise_rate) <= 0.02);
}

TEST_CASE("infeasible synthetic configs are rejected") {
  SynthConfig cfg;
  cfg.contexts_max = 2;  // below the maximum gold-type count
  CHECK_THROWS_AS(generate_synthetic(cfg), ConfigError);

  SynthConfig small;
  small.vocab = small.types * small.triggers_per_type;  // no filler tokens left
  CHECK_THROWS_AS(generate_synthetic(small), ConfigError);

  SynthConfig bad_rho;
  bad_rho.noise_rate = 1.5;
  CHECK_THROWS_AS(generate_synthetic(bad_rho), ConfigError);
}

TEST_CASE("relation instances stay within one split and carry their trigger") {
  SynthConfig cfg;
  cfg.entities = 80;
  cfg.types = 6;
  cfg.relations = 6;
  cfg.vocab = 250;
  cfg.noise_rate = 0.7;
  cfg.seed = 23;
  const Corpus corpus = generate_synthetic(cfg);
  REQUIRE(!corpus.relation_instances.empty());
  int positives = 0;
  for (const RelationInstance& inst : corpus.relation_instances) {
    CHECK(corpus.entities[static_cast<std::size_t>(inst.e1)].split ==
          corpus.entities[static_cast<std::size_t>(inst.e2)].split);
    REQUIRE(!inst.contexts.empty());
    if (inst.relation == corpus.na_relation) continue;
    ++positives;
    // At least one middle segment carries the gold relation's trigger.
    std::set<std::string> triggers;
    for (int j = 0; j < cfg.triggers_per_type; ++j) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "w%04d",
                    (cfg.types + inst.relation) * cfg.triggers_per_type + j);
      triggers.insert(buf);
    }
    bool covered = false;
    for (const RelationContext& ctx : inst.contexts)
      for (const auto& tok : ctx.middle) covered = covered || triggers.count(tok) > 0;
    CHECK(covered);
  }
  CHECK(positives > 0);
}
