#include "bagnet/et.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "bagnet/errors.hpp"
#include "bagnet/numerics.hpp"
#include "bagnet/optim.hpp"

namespace bagnet::et {

std::string mode_name(MimlMode mode) {
  switch (mode) {
    case MimlMode::ds: return "ds";
    case MimlMode::miml_max: return "miml-max";
    case MimlMode::miml_avg: return "miml-avg";
    case MimlMode::miml_max_avg: return "miml-max-avg";
    case MimlMode::miml_att: return "miml-att";
  }
  return "?";
}

MimlMode parse_mode(const std::string& name) {
  if (name == "ds") return MimlMode::ds;
  if (name == "miml-max") return MimlMode::miml_max;
  if (name == "miml-avg") return MimlMode::miml_avg;
  if (name == "miml-max-avg") return MimlMode::miml_max_avg;
  if (name == "miml-att") return MimlMode::miml_att;
  throw ConfigError("unknown entity-typing mode '" + name + "'");
}

Aggregation train_aggregation(MimlMode mode) {
  switch (mode) {
    case MimlMode::ds: return Aggregation::avg;
    case MimlMode::miml_max: return Aggregation::max;
    case MimlMode::miml_avg: return Aggregation::avg;
    case MimlMode::miml_max_avg: return Aggregation::max;  // trains like MAX
    case MimlMode::miml_att: return Aggregation::att;
  }
  return Aggregation::avg;
}

Aggregation predict_aggregation(MimlMode mode) {
  switch (mode) {
    case MimlMode::ds: return Aggregation::avg;
    case MimlMode::miml_max: return Aggregation::max;
    case MimlMode::miml_avg: return Aggregation::avg;
    case MimlMode::miml_max_avg: return Aggregation::avg;
    case MimlMode::miml_att: return Aggregation::att;
  }
  return Aggregation::avg;
}

void init_xavier(nn::Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
}

ETModel::ETModel(const data::Corpus* corpus, const emb::EmbeddingTable* table,
                 ETConfig cfg, MimlMode mode, std::uint64_t seed)
    : corpus_(corpus), table_(table), cfg_(std::move(cfg)), mode_(mode),
      num_types_(corpus->num_types()) {
  const int d = table_->dim();
  const int window = corpus_->window;
  for (int w : cfg_.widths) {
    if (w < 1 || w > window)
      throw ConfigError("ETModel: filter width " + std::to_string(w) +
                        " outside [1, window]");
  }
  if (cfg_.hidden <= 0) throw ConfigError("ETModel: hidden size must be positive");

  Rng rng = Rng::stream(seed, "init");
  phi_dim_ = cfg_.encoder == EncoderKind::cnn
                 ? 2 * cfg_.filters * static_cast<int>(cfg_.widths.size())
                 : 2 * window * d;

  if (cfg_.encoder == EncoderKind::cnn) {
    for (std::size_t wi = 0; wi < cfg_.widths.size(); ++wi) {
      for (int f = 0; f < cfg_.filters; ++f) {
        auto& p = add_param("conv.w" + std::to_string(cfg_.widths[wi]) + ".f" +
                                std::to_string(f),
                            {static_cast<std::size_t>(d),
                             static_cast<std::size_t>(cfg_.widths[wi])});
        init_xavier(p.value, static_cast<std::size_t>(d * cfg_.widths[wi]), 1, rng);
      }
    }
  }
  w_hidden_ = &add_param("hidden", {static_cast<std::size_t>(cfg_.hidden),
                                    static_cast<std::size_t>(phi_dim_)});
  init_xavier(w_hidden_->value, static_cast<std::size_t>(phi_dim_),
              static_cast<std::size_t>(cfg_.hidden), rng);
  w_out_ = &add_param("out.w", {static_cast<std::size_t>(num_types_),
                                static_cast<std::size_t>(cfg_.hidden)});
  init_xavier(w_out_->value, static_cast<std::size_t>(cfg_.hidden),
              static_cast<std::size_t>(num_types_), rng);
  b_out_ = &add_param("out.b", {static_cast<std::size_t>(num_types_)});

  if (mode_ == MimlMode::miml_att) {
    att_m_ = &add_param("att.m", {static_cast<std::size_t>(cfg_.hidden),
                                  static_cast<std::size_t>(d)});
    init_xavier(att_m_->value, static_cast<std::size_t>(cfg_.hidden),
                static_cast<std::size_t>(d), rng);
    // Type vectors start at their distributional embeddings.
    type_vecs_ = &add_param("att.types", {static_cast<std::size_t>(num_types_),
                                          static_cast<std::size_t>(d)});
    for (int t = 0; t < num_types_; ++t) {
      const int row = table_->lookup_or_unk(corpus_->types[static_cast<std::size_t>(t)]);
      auto src = table_->row(row);
      for (int c = 0; c < d; ++c)
        type_vecs_->value.at(static_cast<std::size_t>(t), static_cast<std::size_t>(c)) =
            src[static_cast<std::size_t>(c)];
    }
  }
}

nn::Parameter& ETModel::add_param(const std::string& name,
                                  std::vector<std::size_t> shape) {
  params_.push_back(std::make_unique<nn::Parameter>(name, nn::Tensor(std::move(shape))));
  return *params_.back();
}

nn::Var ETModel::embed_matrix(nn::Tape& tape, std::span<const std::string> tokens) {
  const auto d = static_cast<std::size_t>(table_->dim());
  nn::Tensor e({d, tokens.size()});
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    auto src = table_->row(table_->lookup_or_unk(tokens[j]));
    for (std::size_t r = 0; r < d; ++r) e.at(r, j) = src[r];
  }
  return tape.constant(std::move(e));
}

nn::Var ETModel::encode_context(nn::Tape& tape, const data::Context& ctx) {
  std::vector<nn::Var> phi_parts;
  if (cfg_.encoder == EncoderKind::cnn) {
    // Conv filters occupy params_[0 .. |widths|*n), width-major; the same
    // bank is applied to the left and to the right side.
    const std::size_t bank = cfg_.widths.size() * static_cast<std::size_t>(cfg_.filters);
    nn::Var sides[2] = {embed_matrix(tape, ctx.left), embed_matrix(tape, ctx.right)};
    for (nn::Var side : sides) {
      for (std::size_t fi = 0; fi < bank; ++fi) {
        nn::Var map = tape.conv1d_narrow(side, tape.param(*params_[fi]));
        phi_parts.push_back(tape.kmax_pool(tape.relu(map), 1));
      }
    }
  } else {
    // Flat concatenation of the context word embeddings, left then right.
    const auto d = static_cast<std::size_t>(table_->dim());
    nn::Tensor flat({(ctx.left.size() + ctx.right.size()) * d});
    std::size_t off = 0;
    for (const auto* side : {&ctx.left, &ctx.right}) {
      for (const std::string& tok : *side) {
        auto src = table_->row(table_->lookup_or_unk(tok));
        for (std::size_t r = 0; r < d; ++r) flat[off++] = src[r];
      }
    }
    phi_parts.push_back(tape.constant(std::move(flat)));
  }
  nn::Var phi = phi_parts.size() == 1 ? phi_parts[0] : tape.concat(phi_parts);
  return tape.tanh(tape.matvec(tape.param(*w_hidden_), phi));
}

nn::Var ETModel::context_prob_vector(nn::Tape& tape, nn::Var cvec) {
  return tape.sigmoid(
      tape.add(tape.matvec(tape.param(*w_out_), cvec), tape.param(*b_out_)));
}

nn::Var ETModel::context_loss(nn::Tape& tape, const data::Context& ctx,
                              std::span<const std::uint8_t> labels) {
  nn::Var probs = context_prob_vector(tape, encode_context(tape, ctx));
  std::vector<nn::Var> terms;
  terms.reserve(labels.size());
  for (std::size_t t = 0; t < labels.size(); ++t)
    terms.push_back(tape.bce(labels[t] ? 1.0 : 0.0, tape.pick(probs, t)));
  return tape.sum(tape.concat(terms));
}

nn::Var ETModel::bag_loss(nn::Tape& tape, const data::Bag& bag,
                          std::span<const int> context_ids) {
  if (context_ids.empty()) throw std::invalid_argument("bag_loss: empty bag");
  const Aggregation agg = train_aggregation(mode_);
  const std::size_t q = context_ids.size();

  std::vector<nn::Var> cvecs(q);
  std::vector<nn::Var> probs(q);
  for (std::size_t i = 0; i < q; ++i) {
    cvecs[i] = encode_context(tape, corpus_->contexts[static_cast<std::size_t>(context_ids[i])]);
    probs[i] = context_prob_vector(tape, cvecs[i]);
  }

  std::vector<nn::Var> terms;
  terms.reserve(bag.labels.size());
  for (std::size_t t = 0; t < bag.labels.size(); ++t) {
    nn::Var p_entity;
    if (agg == Aggregation::att) {
      nn::Var mt = tape.matvec(tape.param(*att_m_), tape.row(tape.param(*type_vecs_), t));
      std::vector<nn::Var> scores(q);
      for (std::size_t i = 0; i < q; ++i) scores[i] = tape.dot(cvecs[i], mt);
      nn::Var alpha = tape.softmax(tape.concat(scores));
      nn::Var attended = tape.smul(tape.pick(alpha, 0), cvecs[0]);
      for (std::size_t i = 1; i < q; ++i)
        attended = tape.add(attended, tape.smul(tape.pick(alpha, i), cvecs[i]));
      nn::Var logit = tape.add(tape.dot(tape.row(tape.param(*w_out_), t), attended),
                               tape.pick(tape.param(*b_out_), t));
      p_entity = tape.sigmoid(logit);
    } else {
      std::vector<nn::Var> per_ctx(q);
      for (std::size_t i = 0; i < q; ++i) per_ctx[i] = tape.pick(probs[i], t);
      nn::Var stacked = tape.concat(per_ctx);
      p_entity = agg == Aggregation::max ? tape.max1(stacked) : tape.mean(stacked);
    }
    terms.push_back(tape.bce(bag.labels[t] ? 1.0 : 0.0, p_entity));
  }
  return tape.sum(tape.concat(terms));
}

std::vector<double> ETModel::encode_plain(const data::Context& ctx) {
  nn::Tape tape;
  nn::Var c = encode_context(tape, ctx);
  return tape.value(c).values();
}

std::vector<double> ETModel::context_probs(const data::Context& ctx) {
  nn::Tape tape;
  nn::Var probs = context_prob_vector(tape, encode_context(tape, ctx));
  return tape.value(probs).values();
}

std::vector<double> ETModel::bag_probs(const std::vector<int>& context_ids,
                                       Aggregation agg) {
  if (context_ids.empty()) throw std::invalid_argument("bag_probs: empty bag");
  const auto num_t = static_cast<std::size_t>(num_types_);
  std::vector<double> out(num_t, 0.0);
  if (agg == Aggregation::att) {
    const auto alpha = attention_weights(context_ids);
    std::vector<std::vector<double>> cvecs;
    cvecs.reserve(context_ids.size());
    for (int ci : context_ids)
      cvecs.push_back(encode_plain(corpus_->contexts[static_cast<std::size_t>(ci)]));
    const auto h = static_cast<std::size_t>(cfg_.hidden);
    std::vector<double> weighted(context_ids.size());
    for (std::size_t t = 0; t < num_t; ++t) {
      std::vector<double> attended(h);
      for (std::size_t dim = 0; dim < h; ++dim) {
        for (std::size_t i = 0; i < context_ids.size(); ++i)
          weighted[i] = alpha[i][t] * cvecs[i][dim];
        attended[dim] = exact_sum(weighted);
      }
      double logit = b_out_->value[t];
      for (std::size_t dim = 0; dim < h; ++dim)
        logit += w_out_->value.at(t, dim) * attended[dim];
      out[t] = logit >= 0.0 ? 1.0 / (1.0 + std::exp(-logit))
                            : std::exp(logit) / (1.0 + std::exp(logit));
    }
    return out;
  }

  std::vector<std::vector<double>> per_ctx;
  per_ctx.reserve(context_ids.size());
  for (int ci : context_ids)
    per_ctx.push_back(context_probs(corpus_->contexts[static_cast<std::size_t>(ci)]));
  std::vector<double> column(per_ctx.size());
  for (std::size_t t = 0; t < num_t; ++t) {
    for (std::size_t i = 0; i < per_ctx.size(); ++i) column[i] = per_ctx[i][t];
    if (agg == Aggregation::max) {
      double best = column[0];
      for (double v : column) best = std::max(best, v);
      out[t] = best;
    } else {
      out[t] = exact_mean(column);
    }
  }
  return out;
}

double ETModel::bag_prob(const std::vector<int>& context_ids, int type, Aggregation agg) {
  return bag_probs(context_ids, agg)[static_cast<std::size_t>(type)];
}

std::vector<std::vector<double>> ETModel::attention_weights(
    const std::vector<int>& context_ids) {
  if (mode_ != MimlMode::miml_att)
    throw std::invalid_argument("attention_weights: model is not MIML-ATT");
  const auto num_t = static_cast<std::size_t>(num_types_);
  const auto h = static_cast<std::size_t>(cfg_.hidden);
  const auto d = static_cast<std::size_t>(table_->dim());
  std::vector<std::vector<double>> cvecs;
  cvecs.reserve(context_ids.size());
  for (int ci : context_ids)
    cvecs.push_back(encode_plain(corpus_->contexts[static_cast<std::size_t>(ci)]));

  std::vector<std::vector<double>> alpha(context_ids.size(),
                                         std::vector<double>(num_t, 0.0));
  std::vector<double> mt(h);
  std::vector<double> expo(context_ids.size());
  for (std::size_t t = 0; t < num_t; ++t) {
    for (std::size_t r = 0; r < h; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c)
        acc += att_m_->value.at(r, c) * type_vecs_->value.at(t, c);
      mt[r] = acc;
    }
    double max_score = -std::numeric_limits<double>::infinity();
    std::vector<double> scores(context_ids.size());
    for (std::size_t i = 0; i < context_ids.size(); ++i) {
      double s = 0.0;
      for (std::size_t r = 0; r < h; ++r) s += cvecs[i][r] * mt[r];
      scores[i] = s;
      max_score = std::max(max_score, s);
    }
    for (std::size_t i = 0; i < context_ids.size(); ++i)
      expo[i] = std::exp(scores[i] - max_score);
    const double denom = exact_sum(expo);
    for (std::size_t i = 0; i < context_ids.size(); ++i) alpha[i][t] = expo[i] / denom;
  }
  return alpha;
}

std::vector<nn::Parameter*> ETModel::parameters() {
  std::vector<nn::Parameter*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<nn::Parameter*> ETModel::trainable_parameters() {
  std::vector<nn::Parameter*> out;
  for (auto& p : params_) {
    if (cfg_.freeze_type_vectors && p.get() == type_vecs_) continue;
    out.push_back(p.get());
  }
  return out;
}

void ETModel::snapshot(std::vector<nn::Tensor>& out) const {
  out.clear();
  for (const auto& p : params_) out.push_back(p->value);
}

void ETModel::restore(const std::vector<nn::Tensor>& snap) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    params_[i]->value = snap[i];
    params_[i]->zero_grad();
  }
}

namespace {

eval::TypingPredictions predict_with(ETModel& model, const std::vector<data::Bag>& bags,
                                     Aggregation agg) {
  eval::TypingPredictions preds;
  preds.entities.reserve(bags.size());
  for (const data::Bag& bag : bags) {
    preds.entities.push_back(bag.entity);
    preds.probs.push_back(model.bag_probs(bag.contexts, agg));
    preds.present.push_back(true);
  }
  return preds;
}

double dev_micro_f1(const data::Corpus& corpus, eval::TypingPredictions& preds) {
  const auto thresholds = eval::tune_thresholds(corpus, preds);
  return eval::micro_f1(corpus, preds, thresholds);
}

}  // namespace

eval::TypingPredictions predict_bags(ETModel& model, const std::vector<data::Bag>& bags) {
  return predict_with(model, bags, predict_aggregation(model.mode()));
}

eval::TypingPredictions predict_bags(ETModel& model, const std::vector<data::Bag>& bags,
                                     Aggregation agg) {
  return predict_with(model, bags, agg);
}

TrainResult train_et(ETModel& model, const data::Corpus& corpus,
                     const std::vector<data::Bag>& train_bags,
                     const std::vector<data::Bag>& dev_bags, std::uint64_t seed) {
  const std::uint64_t table_checksum = model.table()->checksum();
  Rng rng = Rng::stream(seed, "shuffle");
  nn::AdaGrad optimizer(model.trainable_parameters(), model.config().lr);
  const auto qmax = static_cast<std::size_t>(model.config().qmax);

  TrainResult result;
  std::vector<nn::Tensor> best;
  model.snapshot(best);
  double best_metric = -1.0;
  int bad_epochs = 0;

  std::vector<std::size_t> order(train_bags.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < model.config().max_epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t oi : order) {
      const data::Bag& bag = train_bags[oi];
      if (model.mode() == MimlMode::ds) {
        // Distant supervision iterates over contexts, labels copied from the
        // entity to every context.
        for (int ci : bag.contexts) {
          nn::Tape tape;
          nn::Var loss = model.context_loss(
              tape, corpus.contexts[static_cast<std::size_t>(ci)], bag.labels);
          epoch_loss += tape.value(loss).item();
          tape.backward(loss);
          optimizer.step();
        }
      } else {
        std::vector<int> subset = bag.contexts;
        if (subset.size() > qmax) {
          auto keep = rng.sample_indices(subset.size(), qmax);
          std::vector<int> sub;
          sub.reserve(qmax);
          for (std::size_t k : keep) sub.push_back(subset[k]);
          subset = std::move(sub);
        }
        nn::Tape tape;
        nn::Var loss = model.bag_loss(tape, bag, subset);
        epoch_loss += tape.value(loss).item();
        tape.backward(loss);
        optimizer.step();
      }
    }
    if (!std::isfinite(epoch_loss))
      throw NumericalError("entity typing training diverged (non-finite loss)");
    result.epoch_losses.push_back(epoch_loss);

    auto dev_preds = predict_with(model, dev_bags, train_aggregation(model.mode()));
    const double metric = dev_bags.empty() ? 0.0 : dev_micro_f1(corpus, dev_preds);
    result.dev_metrics.push_back(metric);
    if (metric > best_metric) {
      best_metric = metric;
      model.snapshot(best);
      result.best_epoch = epoch;
      bad_epochs = 0;
    } else if (++bad_epochs >= model.config().patience) {
      break;
    }
  }
  model.restore(best);
  result.best_dev = best_metric;
  if (model.table()->checksum() != table_checksum)
    throw std::logic_error("embedding table changed during training");
  return result;
}

EntEmbModel::EntEmbModel(const data::Corpus* corpus, const emb::EmbeddingTable* table,
                         int hidden, std::uint64_t seed)
    : corpus_(corpus), table_(table) {
  const auto d = static_cast<std::size_t>(table->dim());
  const auto h = static_cast<std::size_t>(hidden);
  const auto t = static_cast<std::size_t>(corpus->num_types());
  Rng rng = Rng::stream(seed, "init");
  params_.push_back(std::make_unique<nn::Parameter>("entemb.hidden", nn::Tensor({h, d})));
  w_hidden_ = params_.back().get();
  init_xavier(w_hidden_->value, d, h, rng);
  params_.push_back(std::make_unique<nn::Parameter>("entemb.out.w", nn::Tensor({t, h})));
  w_out_ = params_.back().get();
  init_xavier(w_out_->value, h, t, rng);
  params_.push_back(std::make_unique<nn::Parameter>("entemb.out.b", nn::Tensor({t})));
  b_out_ = params_.back().get();
}

nn::Var EntEmbModel::prob_vector(nn::Tape& tape, int entity) {
  const data::Entity& e = corpus_->entities[static_cast<std::size_t>(entity)];
  int row = table_->lookup(e.id);
  if (row < 0) {
    if (!warned_missing_) {
      std::cerr << "warning: entity '" << e.id << "' has no embedding; using "
                << emb::kUnkToken << "\n";
      warned_missing_ = true;
    }
    row = table_->lookup(emb::kUnkToken);
  }
  auto src = table_->row(row);
  nn::Var x = tape.constant(nn::Tensor::vector({src.begin(), src.end()}));
  nn::Var c = tape.tanh(tape.matvec(tape.param(*w_hidden_), x));
  return tape.sigmoid(tape.add(tape.matvec(tape.param(*w_out_), c), tape.param(*b_out_)));
}

nn::Var EntEmbModel::entity_loss(nn::Tape& tape, int entity,
                                 std::span<const std::uint8_t> labels) {
  nn::Var probs = prob_vector(tape, entity);
  std::vector<nn::Var> terms;
  terms.reserve(labels.size());
  for (std::size_t t = 0; t < labels.size(); ++t)
    terms.push_back(tape.bce(labels[t] ? 1.0 : 0.0, tape.pick(probs, t)));
  return tape.sum(tape.concat(terms));
}

std::vector<double> EntEmbModel::predict(int entity) {
  nn::Tape tape;
  return tape.value(prob_vector(tape, entity)).values();
}

std::vector<nn::Parameter*> EntEmbModel::parameters() {
  std::vector<nn::Parameter*> out;
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

void EntEmbModel::snapshot(std::vector<nn::Tensor>& out) const {
  out.clear();
  for (const auto& p : params_) out.push_back(p->value);
}

void EntEmbModel::restore(const std::vector<nn::Tensor>& snap) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    params_[i]->value = snap[i];
    params_[i]->zero_grad();
  }
}

TrainResult train_entemb(EntEmbModel& model, const data::Corpus& corpus,
                         std::uint64_t seed) {
  Rng rng = Rng::stream(seed, "shuffle");
  nn::AdaGrad optimizer(model.parameters(), model.lr);

  std::vector<int> train_entities, dev_entities;
  for (std::size_t i = 0; i < corpus.entities.size(); ++i) {
    if (corpus.entities[i].split == data::Split::train)
      train_entities.push_back(static_cast<int>(i));
    else if (corpus.entities[i].split == data::Split::dev)
      dev_entities.push_back(static_cast<int>(i));
  }

  TrainResult result;
  std::vector<nn::Tensor> best;
  model.snapshot(best);
  double best_metric = -1.0;
  int bad_epochs = 0;
  for (int epoch = 0; epoch < model.max_epochs; ++epoch) {
    rng.shuffle(train_entities);
    double epoch_loss = 0.0;
    for (int e : train_entities) {
      nn::Tape tape;
      const auto labels = corpus.label_vector(corpus.entities[static_cast<std::size_t>(e)]);
      nn::Var loss = model.entity_loss(tape, e, labels);
      epoch_loss += tape.value(loss).item();
      tape.backward(loss);
      optimizer.step();
    }
    if (!std::isfinite(epoch_loss))
      throw NumericalError("EntEmb training diverged (non-finite loss)");
    result.epoch_losses.push_back(epoch_loss);

    auto dev_preds = predict_entities(model, dev_entities);
    const double metric = dev_entities.empty() ? 0.0 : dev_micro_f1(corpus, dev_preds);
    result.dev_metrics.push_back(metric);
    if (metric > best_metric) {
      best_metric = metric;
      model.snapshot(best);
      result.best_epoch = epoch;
      bad_epochs = 0;
    } else if (++bad_epochs >= model.patience) {
      break;
    }
  }
  model.restore(best);
  result.best_dev = best_metric;
  return result;
}

eval::TypingPredictions predict_entities(EntEmbModel& model,
                                         const std::vector<int>& entities) {
  eval::TypingPredictions preds;
  for (int e : entities) {
    preds.entities.push_back(e);
    preds.probs.push_back(model.predict(e));
    preds.present.push_back(true);
  }
  return preds;
}

std::vector<double> join_models(std::span<const double> pa, std::span<const double> pb) {
  if (pa.size() != pb.size())
    throw std::invalid_argument("join_models: length mismatch");
  std::vector<double> out(pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i) out[i] = 0.5 * (pa[i] + pb[i]);
  return out;
}

void write_predictions_file(const std::string& path, const data::Corpus& corpus,
                            const eval::TypingPredictions& preds) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  char buf[48];
  for (std::size_t i = 0; i < preds.entities.size(); ++i) {
    if (!preds.present[i]) continue;
    const data::Entity& e = corpus.entities[static_cast<std::size_t>(preds.entities[i])];
    for (int t = 0; t < corpus.num_types(); ++t) {
      const double p = preds.probs[i][static_cast<std::size_t>(t)];
      const bool gold = std::binary_search(e.gold_types.begin(), e.gold_types.end(), t);
      if (p <= 1e-4 && !gold) continue;
      std::snprintf(buf, sizeof(buf), "%.17g", p);
      out << e.id << "\t" << corpus.types[static_cast<std::size_t>(t)] << "\t" << buf
          << "\n";
    }
  }
}

std::unordered_map<int, std::vector<double>> read_predictions_file(
    const std::string& path, const data::Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::unordered_map<int, std::vector<double>> out;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string entity, type, prob;
    if (!std::getline(ls, entity, '\t') || !std::getline(ls, type, '\t') ||
        !std::getline(ls, prob))
      throw DataError(path + ":" + std::to_string(ln) + ": expected 3 fields");
    auto eit = corpus.entity_index.find(entity);
    if (eit == corpus.entity_index.end())
      throw DataError(path + ":" + std::to_string(ln) + ": unknown entity '" + entity +
                      "'");
    const int t = corpus.type_id(type);
    if (t < 0)
      throw DataError(path + ":" + std::to_string(ln) + ": unknown type '" + type + "'");
    auto& probs = out[eit->second];
    if (probs.empty()) probs.assign(static_cast<std::size_t>(corpus.num_types()), 0.0);
    probs[static_cast<std::size_t>(t)] = std::stod(prob);
  }
  return out;
}

}  // namespace bagnet::et
