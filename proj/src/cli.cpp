#include "bagnet/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bagnet/checkpoint.hpp"
#include "bagnet/config.hpp"
#include "bagnet/errors.hpp"
#include "bagnet/experiments.hpp"
#include "bagnet/optim.hpp"

namespace bagnet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string timestamp_dir(const std::string& command) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", std::localtime(&t));
  return "runs/" + command + "-" + buf;
}

std::string ensure_outdir(cfg::RunConfig& run, const std::string& command) {
  std::string out = run.out.empty() ? timestamp_dir(command) : run.out;
  fs::create_directories(out);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  f << text;
}

void write_report(const std::string& path, const json& report) {
  write_text(path, report.dump(2) + "\n");
}

emb::EmbeddingTable load_or_train_table(const cfg::RunConfig& run,
                                        const data::Corpus& corpus) {
  if (!run.emb_path.empty()) return emb::import_word2vec_text(run.emb_path);
  const auto stream = emb::duplicate_with_types(corpus, emb::sentence_stream(corpus));
  return emb::train_embeddings(corpus, stream, run.emb_dim, run.emb_window);
}

struct EtArtifacts {
  json report;
  eval::TypingPredictions all_preds;  // every entity with a bag
  std::vector<double> thresholds;
};

// Shared by train-et and evaluate so a re-evaluation reproduces the
// training-time report exactly.
template <class PredictFn>
EtArtifacts evaluate_typing(const cfg::RunConfig& run, const data::Corpus& corpus,
                            PredictFn&& predict) {
  EtArtifacts art;
  const auto train_bags = data::make_bags(corpus, data::Split::train);
  const auto dev_bags = data::make_bags(corpus, data::Split::dev);
  const auto test_bags = data::make_bags(corpus, data::Split::test);

  const auto dev_preds = predict(dev_bags);
  const auto test_preds = predict(test_bags);
  art.thresholds = eval::tune_thresholds(corpus, dev_preds);

  const auto dev_report = eval::typing_report(corpus, dev_preds, art.thresholds,
                                              run.head_threshold, run.tail_threshold);
  const auto test_report = eval::typing_report(corpus, test_preds, art.thresholds,
                                               run.head_threshold, run.tail_threshold);
  auto block = [](const eval::TypingReport& r) {
    return json{{"p_at_1", r.p_at_1},
                {"micro_f1_all", r.micro_f1_all},
                {"micro_f1_head", r.micro_f1_head},
                {"micro_f1_tail", r.micro_f1_tail},
                {"map", r.map}};
  };
  art.report = json{{"seed", run.seed},
                    {"mode", run.et_mode},
                    {"dev", block(dev_report)},
                    {"test", block(test_report)}};

  const auto train_preds = predict(train_bags);
  for (const auto* preds : {&train_preds, &dev_preds, &test_preds}) {
    art.all_preds.entities.insert(art.all_preds.entities.end(), preds->entities.begin(),
                                  preds->entities.end());
    art.all_preds.probs.insert(art.all_preds.probs.end(), preds->probs.begin(),
                               preds->probs.end());
    art.all_preds.present.insert(art.all_preds.present.end(), preds->present.begin(),
                                 preds->present.end());
  }
  return art;
}

void write_thresholds(const std::string& path, const data::Corpus& corpus,
                      const std::vector<double>& thresholds) {
  std::ofstream out(path);
  char buf[48];
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    std::snprintf(buf, sizeof(buf), "%.17g", thresholds[t]);
    out << corpus.types[t] << "\t" << buf << "\n";
  }
}

int cmd_gen_corpus(cfg::RunConfig& run) {
  const std::string out = ensure_outdir(run, "gen-corpus");
  const data::Corpus corpus = data::generate_synthetic(run.synth_with_seed());
  data::save_corpus(corpus, out);
  run.save_snapshot(out + "/config.txt");
  std::cout << "corpus: " << corpus.entities.size() << " entities, "
            << corpus.contexts.size() << " contexts, " << corpus.relation_instances.size()
            << " relation instances -> " << out << "\n";
  return 0;
}

int cmd_train_embeddings(cfg::RunConfig& run) {
  if (run.corpus_dir.empty()) throw ConfigError("train-embeddings: corpus.dir required");
  const std::string out = ensure_outdir(run, "train-embeddings");
  const data::Corpus corpus = data::load_corpus(run.corpus_dir);
  const auto stream = emb::duplicate_with_types(corpus, emb::sentence_stream(corpus));
  std::vector<std::string> flagged;
  const auto table =
      emb::train_embeddings(corpus, stream, run.emb_dim, run.emb_window, &flagged);
  for (const auto& tok : flagged)
    std::cerr << "warning: token '" << tok << "' never co-occurs; zero vector\n";
  emb::export_word2vec_text(table, out + "/embeddings.txt");
  run.save_snapshot(out + "/config.txt");
  std::cout << "embeddings: " << table.size() << " tokens, dim " << table.dim() << " -> "
            << out << "\n";
  return 0;
}

int cmd_train_et(cfg::RunConfig& run) {
  if (run.corpus_dir.empty()) throw ConfigError("train-et: corpus.dir required");
  const std::string out = ensure_outdir(run, "train-et");
  const data::Corpus corpus = data::load_corpus(run.corpus_dir);
  const auto table = load_or_train_table(run, corpus);
  const auto train_bags = data::make_bags(corpus, data::Split::train);
  const auto dev_bags = data::make_bags(corpus, data::Split::dev);

  EtArtifacts art;
  if (run.et_mode == "entemb") {
    et::EntEmbModel model(&corpus, &table, run.et.hidden, run.seed);
    model.lr = run.et.lr;
    model.max_epochs = run.et.max_epochs;
    model.patience = run.et.patience;
    et::train_entemb(model, corpus, run.seed);
    art = evaluate_typing(run, corpus, [&](const std::vector<data::Bag>& bags) {
      std::vector<int> entities;
      for (const auto& bag : bags) entities.push_back(bag.entity);
      return et::predict_entities(model, entities);
    });
    std::vector<const nn::Parameter*> params;
    for (auto* p : model.parameters()) params.push_back(p);
    nn::save_checkpoint(out + "/model.ckpt", params);
  } else {
    et::ETModel model(&corpus, &table, run.et, et::parse_mode(run.et_mode), run.seed);
    et::train_et(model, corpus, train_bags, dev_bags, run.seed);
    art = evaluate_typing(run, corpus, [&](const std::vector<data::Bag>& bags) {
      return et::predict_bags(model, bags);
    });
    std::vector<const nn::Parameter*> params;
    for (auto* p : model.parameters()) params.push_back(p);
    nn::save_checkpoint(out + "/model.ckpt", params);
  }
  et::write_predictions_file(out + "/predictions.tsv", corpus, art.all_preds);
  write_thresholds(out + "/thresholds.tsv", corpus, art.thresholds);
  write_report(out + "/report.json", art.report);
  run.save_snapshot(out + "/config.txt");
  std::cout << "train-et " << run.et_mode << ": dev micro-F1 "
            << art.report["dev"]["micro_f1_all"] << ", test micro-F1 "
            << art.report["test"]["micro_f1_all"] << " -> " << out << "\n";
  return 0;
}

struct ReArtifacts {
  json report;
  std::vector<eval::PairScore> test_scores;
  eval::PrCurve curve;
};

ReArtifacts evaluate_relation(const cfg::RunConfig& run, const data::Corpus& corpus,
                              re::REModel& model) {
  ReArtifacts art;
  const auto re_dev = data::relation_bags(corpus, data::Split::dev);
  const auto re_test = data::relation_bags(corpus, data::Split::test);
  const auto dev_scores = re::pair_scores(model, re_dev);
  art.test_scores = re::pair_scores(model, re_test);
  const auto dev_curve = eval::pr_curve(dev_scores, re_dev, corpus.na_relation);
  art.curve = eval::pr_curve(art.test_scores, re_test, corpus.na_relation);
  const auto rel_f1 = eval::per_relation_f1(corpus, re_test,
                                            re::all_pair_probs(model, re_test));
  art.report = json{{"seed", run.seed},
                    {"encoder", re::encoder_name(model.config().encoder)},
                    {"integration", re::integration_name(model.config().integration)},
                    {"gamma", model.config().gamma},
                    {"dev_pr_area", dev_curve.area},
                    {"test_pr_area", art.curve.area},
                    {"per_relation_f1", rel_f1}};
  return art;
}

void write_pr_curve(const std::string& path, const eval::PrCurve& curve) {
  std::ofstream out(path);
  out << "recall,precision\n";
  char buf[96];
  for (std::size_t i = 0; i < curve.recall.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", curve.recall[i], curve.precision[i]);
    out << buf << "\n";
  }
}

int cmd_train_re(cfg::RunConfig& run, bool force_joint) {
  if (run.corpus_dir.empty()) throw ConfigError("train-re: corpus.dir required");
  if (force_joint) run.re.integration = re::TypeIntegration::joint_train;
  const std::string command = force_joint ? "train-joint" : "train-re";
  const std::string out = ensure_outdir(run, command);
  const data::Corpus corpus = data::load_corpus(run.corpus_dir);
  const auto table = load_or_train_table(run, corpus);

  re::REModel model(&corpus, &table, run.re, run.seed);
  const bool needs_pipeline = run.re.integration != re::TypeIntegration::none &&
                              run.re.integration != re::TypeIntegration::joint_train;
  if (needs_pipeline) {
    if (run.re_et_predictions.empty())
      throw ConfigError(command + ": re.et_predictions required for integration " +
                        re::integration_name(run.re.integration));
    model.set_pipeline_probs(et::read_predictions_file(run.re_et_predictions, corpus));
  }
  const auto re_train = data::relation_bags(corpus, data::Split::train);
  const auto re_dev = data::relation_bags(corpus, data::Split::dev);
  re::train_re(model, corpus, re_train, re_dev, run.seed);

  ReArtifacts art = evaluate_relation(run, corpus, model);
  re::write_scores_file(out + "/scores.tsv", corpus, art.test_scores);
  write_pr_curve(out + "/pr_curve.csv", art.curve);
  write_report(out + "/report.json", art.report);
  std::vector<const nn::Parameter*> params;
  for (auto* p : model.parameters()) params.push_back(p);
  nn::save_checkpoint(out + "/model.ckpt", params);
  run.save_snapshot(out + "/config.txt");
  std::cout << command << " " << re::integration_name(run.re.integration)
            << ": test PR area " << art.report["test_pr_area"] << " -> " << out << "\n";
  return 0;
}

int cmd_evaluate(cfg::RunConfig& run, const std::string& run_dir) {
  if (run_dir.empty()) throw ConfigError("evaluate: --run <dir> required");
  cfg::RunConfig trained;
  trained.load_file(run_dir + "/config.txt");
  trained.out = run.out;  // only the output location comes from this run
  const std::string out = ensure_outdir(trained, "evaluate");

  const data::Corpus corpus = data::load_corpus(trained.corpus_dir);
  const auto table = load_or_train_table(trained, corpus);
  const std::string ckpt = run_dir + "/model.ckpt";

  const bool is_re = fs::exists(run_dir + "/pr_curve.csv");
  if (is_re) {
    re::REModel model(&corpus, &table, trained.re, trained.seed);
    const bool needs_pipeline =
        trained.re.integration != re::TypeIntegration::none &&
        trained.re.integration != re::TypeIntegration::joint_train;
    if (needs_pipeline)
      model.set_pipeline_probs(
          et::read_predictions_file(trained.re_et_predictions, corpus));
    nn::load_checkpoint_into(ckpt, model.parameters());
    ReArtifacts art = evaluate_relation(trained, corpus, model);
    write_report(out + "/report.json", art.report);
    std::cout << "evaluate: test PR area " << art.report["test_pr_area"] << " -> " << out
              << "\n";
  } else {
    EtArtifacts art;
    if (trained.et_mode == "entemb") {
      et::EntEmbModel model(&corpus, &table, trained.et.hidden, trained.seed);
      nn::load_checkpoint_into(ckpt, model.parameters());
      art = evaluate_typing(trained, corpus, [&](const std::vector<data::Bag>& bags) {
        std::vector<int> entities;
        for (const auto& bag : bags) entities.push_back(bag.entity);
        return et::predict_entities(model, entities);
      });
    } else {
      et::ETModel model(&corpus, &table, trained.et, et::parse_mode(trained.et_mode),
                        trained.seed);
      nn::load_checkpoint_into(ckpt, model.parameters());
      art = evaluate_typing(trained, corpus, [&](const std::vector<data::Bag>& bags) {
        return et::predict_bags(model, bags);
      });
    }
    write_report(out + "/report.json", art.report);
    std::cout << "evaluate: test micro-F1 " << art.report["test"]["micro_f1_all"]
              << " -> " << out << "\n";
  }
  trained.save_snapshot(out + "/config.txt");
  return 0;
}

int cmd_sweep(cfg::RunConfig& run) {
  const std::string out = ensure_outdir(run, "sweep");
  exp::GridResult grid;
  if (run.sweep_task == "et") {
    grid = exp::run_et_grid(
        run, {"ds", "miml-max", "miml-avg", "miml-max-avg", "miml-att", "entemb"},
        run.sweep_seeds);
  } else {
    grid = exp::run_re_grid(run,
                            {"entemb", "piecewise", "none", "binary", "binary-hidden",
                             "predicted-hidden", "weighted", "joint-train"},
                            run.sweep_seeds);
  }
  const std::string csv = exp::grid_csv(grid);
  write_text(out + "/sweep.csv", csv);
  run.save_snapshot(out + "/config.txt");
  std::cout << csv;
  std::cout << "sweep " << run.sweep_task << " -> " << out << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"bagnet: MIML entity typing and type-aware relation extraction"};
  app.require_subcommand(1);

  std::string config_path, out_flag, mode_flag, integration_flag, encoder_flag, run_dir;
  std::string gamma_flag, noise_flag, seed_flag;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value config file");
    cmd->add_option("--seed", seed_flag, "master random seed");
    cmd->add_option("--out", out_flag, "output directory");
    cmd->add_option("--noise-rate", noise_flag, "synthetic noise rate rho");
    cmd->add_option("--gamma", gamma_flag, "joint-training RE cost weight");
  };

  CLI::App* gen = app.add_subcommand("gen-corpus", "generate a synthetic corpus");
  add_common(gen);
  CLI::App* emb_cmd = app.add_subcommand("train-embeddings", "train PPMI-SVD embeddings");
  add_common(emb_cmd);
  CLI::App* et_cmd = app.add_subcommand("train-et", "train an entity typing model");
  add_common(et_cmd);
  et_cmd->add_option("--mode", mode_flag, "ds|miml-max|miml-avg|miml-max-avg|miml-att|entemb");
  et_cmd->add_option("--encoder", encoder_flag, "cnn|mlp");
  CLI::App* re_cmd = app.add_subcommand("train-re", "train a relation extraction model");
  add_common(re_cmd);
  re_cmd->add_option("--integration", integration_flag,
                     "none|binary|binary-hidden|predicted-hidden|weighted|joint-train");
  re_cmd->add_option("--encoder", encoder_flag, "contextwise|piecewise|entemb");
  CLI::App* joint_cmd = app.add_subcommand("train-joint", "joint ET+RE training");
  add_common(joint_cmd);
  joint_cmd->add_option("--encoder", encoder_flag, "contextwise|entemb");
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "re-evaluate a finished run");
  add_common(eval_cmd);
  eval_cmd->add_option("--run", run_dir, "run directory with config.txt and model.ckpt");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "mode/variant grid over seeds");
  add_common(sweep_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    cfg::RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    // Flags win over the config file.
    if (!seed_flag.empty()) cfg.set("seed", seed_flag);
    if (!out_flag.empty()) cfg.set("out", out_flag);
    if (!noise_flag.empty()) cfg.set("synth.noise_rate", noise_flag);
    if (!gamma_flag.empty()) cfg.set("re.gamma", gamma_flag);
    if (!mode_flag.empty()) cfg.set("et.mode", mode_flag);
    if (!integration_flag.empty()) cfg.set("re.integration", integration_flag);
    if (!encoder_flag.empty()) {
      if (app.got_subcommand(et_cmd)) cfg.set("et.encoder", encoder_flag);
      else cfg.set("re.encoder", encoder_flag);
    }

    if (app.got_subcommand(gen)) return cmd_gen_corpus(cfg);
    if (app.got_subcommand(emb_cmd)) return cmd_train_embeddings(cfg);
    if (app.got_subcommand(et_cmd)) return cmd_train_et(cfg);
    if (app.got_subcommand(re_cmd)) return cmd_train_re(cfg, false);
    if (app.got_subcommand(joint_cmd)) return cmd_train_re(cfg, true);
    if (app.got_subcommand(eval_cmd)) return cmd_evaluate(cfg, run_dir);
    if (app.got_subcommand(sweep_cmd)) return cmd_sweep(cfg);
    throw ConfigError("no subcommand");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace bagnet::cli
