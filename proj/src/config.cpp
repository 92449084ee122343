#include "bagnet/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bagnet/errors.hpp"

namespace bagnet::cfg {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(key + ": expected integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(key + ": expected number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(to_int(key, trim(item))));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_int_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s.push_back(',');
    s += std::to_string(v[i]);
  }
  return s;
}

struct KeyBinding {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, KeyBinding>& bindings() {
  static const std::map<std::string, KeyBinding> table = [] {
    std::map<std::string, KeyBinding> m;
    auto add = [&m](const std::string& key,
                    std::function<void(RunConfig&, const std::string&)> set,
                    std::function<std::string(const RunConfig&)> get) {
      m[key] = KeyBinding{std::move(set), std::move(get)};
    };

    add("seed",
        [](RunConfig& c, const std::string& v) {
          c.seed = static_cast<std::uint64_t>(to_int("seed", v));
        },
        [](const RunConfig& c) { return std::to_string(c.seed); });
    add("out", [](RunConfig& c, const std::string& v) { c.out = v; },
        [](const RunConfig& c) { return c.out; });
    add("corpus.dir", [](RunConfig& c, const std::string& v) { c.corpus_dir = v; },
        [](const RunConfig& c) { return c.corpus_dir; });
    add("corpus.head_threshold",
        [](RunConfig& c, const std::string& v) {
          c.head_threshold = static_cast<int>(to_int("corpus.head_threshold", v));
        },
        [](const RunConfig& c) { return std::to_string(c.head_threshold); });
    add("corpus.tail_threshold",
        [](RunConfig& c, const std::string& v) {
          c.tail_threshold = static_cast<int>(to_int("corpus.tail_threshold", v));
        },
        [](const RunConfig& c) { return std::to_string(c.tail_threshold); });

    auto add_int = [&add](const std::string& key, std::function<int&(RunConfig&)> ref) {
      add(key,
          [key, ref](RunConfig& c, const std::string& v) {
            ref(c) = static_cast<int>(to_int(key, v));
          },
          [ref](const RunConfig& c) {
            return std::to_string(ref(const_cast<RunConfig&>(c)));
          });
    };

    add_int("synth.types", [](RunConfig& c) -> int& { return c.synth.types; });
    add_int("synth.relations",
            [](RunConfig& c) -> int& { return c.synth.relations; });
    add_int("synth.entities",
            [](RunConfig& c) -> int& { return c.synth.entities; });
    add_int("synth.contexts_min",
            [](RunConfig& c) -> int& { return c.synth.contexts_min; });
    add_int("synth.contexts_max",
            [](RunConfig& c) -> int& { return c.synth.contexts_max; });
    add("synth.noise_rate",
        [](RunConfig& c, const std::string& v) {
          c.synth.noise_rate = to_double("synth.noise_rate", v);
        },
        [](const RunConfig& c) { return format_double(c.synth.noise_rate); });
    add_int("synth.vocab", [](RunConfig& c) -> int& { return c.synth.vocab; });
    add_int("synth.triggers_per_type",
            [](RunConfig& c) -> int& { return c.synth.triggers_per_type; });
    add_int("synth.window", [](RunConfig& c) -> int& { return c.synth.window; });
    add_int("synth.pairs", [](RunConfig& c) -> int& { return c.synth.pairs; });
    add_int("synth.pair_contexts_min",
            [](RunConfig& c) -> int& { return c.synth.pair_contexts_min; });
    add_int("synth.pair_contexts_max",
            [](RunConfig& c) -> int& { return c.synth.pair_contexts_max; });

    add_int("emb.dim", [](RunConfig& c) -> int& { return c.emb_dim; });
    add_int("emb.window", [](RunConfig& c) -> int& { return c.emb_window; });
    add("emb.path", [](RunConfig& c, const std::string& v) { c.emb_path = v; },
        [](const RunConfig& c) { return c.emb_path; });

    add("et.encoder",
        [](RunConfig& c, const std::string& v) {
          if (v == "cnn") c.et.encoder = et::EncoderKind::cnn;
          else if (v == "mlp") c.et.encoder = et::EncoderKind::mlp;
          else throw ConfigError("et.encoder: expected cnn or mlp");
        },
        [](const RunConfig& c) {
          return c.et.encoder == et::EncoderKind::cnn ? "cnn" : "mlp";
        });
    add("et.mode",
        [](RunConfig& c, const std::string& v) {
          if (v != "entemb") et::parse_mode(v);  // validates
          c.et_mode = v;
        },
        [](const RunConfig& c) { return c.et_mode; });
    add_int("et.hidden", [](RunConfig& c) -> int& { return c.et.hidden; });
    add_int("et.filters", [](RunConfig& c) -> int& { return c.et.filters; });
    add("et.widths",
        [](RunConfig& c, const std::string& v) { c.et.widths = to_int_list("et.widths", v); },
        [](const RunConfig& c) { return format_int_list(c.et.widths); });
    add("et.lr",
        [](RunConfig& c, const std::string& v) { c.et.lr = to_double("et.lr", v); },
        [](const RunConfig& c) { return format_double(c.et.lr); });
    add_int("et.epochs", [](RunConfig& c) -> int& { return c.et.max_epochs; });
    add_int("et.patience", [](RunConfig& c) -> int& { return c.et.patience; });
    add_int("et.qmax", [](RunConfig& c) -> int& { return c.et.qmax; });
    add("et.freeze_types",
        [](RunConfig& c, const std::string& v) {
          c.et.freeze_type_vectors = to_bool("et.freeze_types", v);
        },
        [](const RunConfig& c) { return c.et.freeze_type_vectors ? "true" : "false"; });

    add("re.encoder",
        [](RunConfig& c, const std::string& v) { c.re.encoder = re::parse_encoder(v); },
        [](const RunConfig& c) { return re::encoder_name(c.re.encoder); });
    add("re.integration",
        [](RunConfig& c, const std::string& v) {
          c.re.integration = re::parse_integration(v);
        },
        [](const RunConfig& c) { return re::integration_name(c.re.integration); });
    add("re.joint_et",
        [](RunConfig& c, const std::string& v) { c.re.joint_et = re::parse_joint_et(v); },
        [](const RunConfig& c) { return re::joint_et_name(c.re.joint_et); });
    add_int("re.hidden", [](RunConfig& c) -> int& { return c.re.hidden; });
    add_int("re.et_hidden", [](RunConfig& c) -> int& { return c.re.et_hidden; });
    add_int("re.filters", [](RunConfig& c) -> int& { return c.re.filters; });
    add("re.widths",
        [](RunConfig& c, const std::string& v) { c.re.widths = to_int_list("re.widths", v); },
        [](const RunConfig& c) { return format_int_list(c.re.widths); });
    add_int("re.tau", [](RunConfig& c) -> int& { return c.re.tau; });
    add("re.gamma",
        [](RunConfig& c, const std::string& v) { c.re.gamma = to_double("re.gamma", v); },
        [](const RunConfig& c) { return format_double(c.re.gamma); });
    add("re.lr",
        [](RunConfig& c, const std::string& v) { c.re.lr = to_double("re.lr", v); },
        [](const RunConfig& c) { return format_double(c.re.lr); });
    add_int("re.epochs", [](RunConfig& c) -> int& { return c.re.max_epochs; });
    add_int("re.patience", [](RunConfig& c) -> int& { return c.re.patience; });
    add("re.et_predictions",
        [](RunConfig& c, const std::string& v) { c.re_et_predictions = v; },
        [](const RunConfig& c) { return c.re_et_predictions; });

    add("sweep.task",
        [](RunConfig& c, const std::string& v) {
          if (v != "et" && v != "re") throw ConfigError("sweep.task: expected et or re");
          c.sweep_task = v;
        },
        [](const RunConfig& c) { return c.sweep_task; });
    add("sweep.seeds",
        [](RunConfig& c, const std::string& v) {
          c.sweep_seeds.clear();
          for (int s : to_int_list("sweep.seeds", v))
            c.sweep_seeds.push_back(static_cast<std::uint64_t>(s));
        },
        [](const RunConfig& c) {
          std::string s;
          for (std::size_t i = 0; i < c.sweep_seeds.size(); ++i) {
            if (i) s.push_back(',');
            s += std::to_string(c.sweep_seeds[i]);
          }
          return s;
        });
    return m;
  }();
  return table;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = bindings().find(key);
  if (it == bindings().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(*this, value);
}

std::string RunConfig::snapshot() const {
  std::string out;
  for (const auto& [key, binding] : bindings())
    out += key + " = " + binding.get(*this) + "\n";
  return out;
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(ln) + ": expected 'key = value'");
    set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
}

void RunConfig::save_snapshot(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config snapshot " + path);
  out << snapshot();
}

data::SynthConfig RunConfig::synth_with_seed() const {
  data::SynthConfig s = synth;
  s.seed = seed;
  return s;
}

std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, binding] : bindings()) keys.push_back(key);
  return keys;
}

}  // namespace bagnet::cfg
