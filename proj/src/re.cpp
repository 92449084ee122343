#include "bagnet/re.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "bagnet/errors.hpp"
#include "bagnet/et.hpp"
#include "bagnet/optim.hpp"

namespace bagnet::re {

using et::init_xavier;

std::string encoder_name(REEncoder e) {
  switch (e) {
    case REEncoder::contextwise: return "contextwise";
    case REEncoder::piecewise: return "piecewise";
    case REEncoder::entemb: return "entemb";
  }
  return "?";
}

REEncoder parse_encoder(const std::string& name) {
  if (name == "contextwise") return REEncoder::contextwise;
  if (name == "piecewise") return REEncoder::piecewise;
  if (name == "entemb") return REEncoder::entemb;
  throw ConfigError("unknown relation encoder '" + name + "'");
}

std::string integration_name(TypeIntegration i) {
  switch (i) {
    case TypeIntegration::none: return "none";
    case TypeIntegration::binary: return "binary";
    case TypeIntegration::binary_hidden: return "binary-hidden";
    case TypeIntegration::predicted_hidden: return "predicted-hidden";
    case TypeIntegration::weighted: return "weighted";
    case TypeIntegration::joint_train: return "joint-train";
  }
  return "?";
}

TypeIntegration parse_integration(const std::string& name) {
  if (name == "none") return TypeIntegration::none;
  if (name == "binary") return TypeIntegration::binary;
  if (name == "binary-hidden") return TypeIntegration::binary_hidden;
  if (name == "predicted-hidden") return TypeIntegration::predicted_hidden;
  if (name == "weighted") return TypeIntegration::weighted;
  if (name == "joint-train") return TypeIntegration::joint_train;
  throw ConfigError("unknown type integration '" + name + "'");
}

std::string joint_et_name(JointEtKind k) {
  switch (k) {
    case JointEtKind::context_mlp: return "context-mlp";
    case JointEtKind::entemb: return "entemb";
    case JointEtKind::dual: return "dual";
  }
  return "?";
}

JointEtKind parse_joint_et(const std::string& name) {
  if (name == "context-mlp") return JointEtKind::context_mlp;
  if (name == "entemb") return JointEtKind::entemb;
  if (name == "dual") return JointEtKind::dual;
  throw ConfigError("unknown joint ET submodel '" + name + "'");
}

REModel::REModel(const data::Corpus* corpus, const emb::EmbeddingTable* table,
                 REConfig cfg, std::uint64_t seed)
    : corpus_(corpus), table_(table), cfg_(std::move(cfg)),
      num_relations_(static_cast<int>(corpus->relations.size())) {
  const int d = table_->dim();
  const int num_types = corpus_->num_types();
  if (cfg_.encoder == REEncoder::piecewise && cfg_.integration != TypeIntegration::none)
    throw ConfigError("piecewise encoder does not take type integration");
  if (cfg_.hidden <= 0 || cfg_.filters <= 0 || cfg_.tau <= 0)
    throw ConfigError("REModel: sizes must be positive");

  int max_width = 1;
  for (int w : cfg_.widths) max_width = std::max(max_width, w);
  // Parts are padded so every feature map has >= 3 positions (3-max pooling
  // for contextwise, three piecewise segments).
  min_part_len_ = max_width + 2;

  Rng rng = Rng::stream(seed, "init");
  const int nw = cfg_.filters * static_cast<int>(cfg_.widths.size());
  switch (cfg_.encoder) {
    case REEncoder::contextwise: phi_dim_ = 3 * 3 * nw; break;
    case REEncoder::piecewise: phi_dim_ = 3 * nw; break;
    case REEncoder::entemb: phi_dim_ = 2 * d; break;
  }

  switch (cfg_.integration) {
    case TypeIntegration::none: tau_ = 0; break;
    case TypeIntegration::binary: tau_ = num_types; break;
    case TypeIntegration::weighted: tau_ = d; break;
    default: tau_ = cfg_.tau; break;
  }

  if (cfg_.encoder != REEncoder::entemb) {
    for (int w : cfg_.widths) {
      for (int f = 0; f < cfg_.filters; ++f) {
        auto& p = add_param("conv.w" + std::to_string(w) + ".f" + std::to_string(f),
                            {static_cast<std::size_t>(d), static_cast<std::size_t>(w)});
        init_xavier(p.value, static_cast<std::size_t>(d * w), 1, rng);
      }
    }
    conv_bank_ = params_.size();
  }

  const int in_dim = phi_dim_ + 2 * tau_;
  if (cfg_.encoder == REEncoder::piecewise) {
    // Softmax layer directly after pooling, no hidden layer.
    w_out_ = &add_param("out.w", {static_cast<std::size_t>(num_relations_),
                                  static_cast<std::size_t>(phi_dim_)});
    init_xavier(w_out_->value, static_cast<std::size_t>(phi_dim_),
                static_cast<std::size_t>(num_relations_), rng);
  } else {
    w_hidden_ = &add_param("hidden", {static_cast<std::size_t>(cfg_.hidden),
                                      static_cast<std::size_t>(in_dim)});
    init_xavier(w_hidden_->value, static_cast<std::size_t>(in_dim),
                static_cast<std::size_t>(cfg_.hidden), rng);
    w_out_ = &add_param("out.w", {static_cast<std::size_t>(num_relations_),
                                  static_cast<std::size_t>(cfg_.hidden)});
    init_xavier(w_out_->value, static_cast<std::size_t>(cfg_.hidden),
                static_cast<std::size_t>(num_relations_), rng);
  }

  switch (cfg_.integration) {
    case TypeIntegration::binary_hidden:
    case TypeIntegration::predicted_hidden:
    case TypeIntegration::joint_train:
      type_w_ = &add_param("type.w", {static_cast<std::size_t>(tau_),
                                      static_cast<std::size_t>(num_types)});
      init_xavier(type_w_->value, static_cast<std::size_t>(num_types),
                  static_cast<std::size_t>(tau_), rng);
      break;
    case TypeIntegration::weighted: {
      // Columns of W_t are the distributional type embeddings; kept fixed.
      weighted_wt_ = nn::Tensor({static_cast<std::size_t>(d),
                                 static_cast<std::size_t>(num_types)});
      for (int t = 0; t < num_types; ++t) {
        auto src = table_->row(
            table_->lookup_or_unk(corpus_->types[static_cast<std::size_t>(t)]));
        for (int r = 0; r < d; ++r)
          weighted_wt_.at(static_cast<std::size_t>(r), static_cast<std::size_t>(t)) =
              src[static_cast<std::size_t>(r)];
      }
      break;
    }
    default: break;
  }

  if (cfg_.integration == TypeIntegration::joint_train) {
    const auto h_et = static_cast<std::size_t>(cfg_.et_hidden);
    const auto t_sz = static_cast<std::size_t>(num_types);
    if (cfg_.joint_et == JointEtKind::context_mlp || cfg_.joint_et == JointEtKind::dual) {
      const auto in = static_cast<std::size_t>(2 * corpus_->window * d);
      et_hidden_w_ = &add_param("et.hidden", {h_et, in});
      init_xavier(et_hidden_w_->value, in, h_et, rng);
      et_out_w_ = &add_param("et.out.w", {t_sz, h_et});
      init_xavier(et_out_w_->value, h_et, t_sz, rng);
      et_out_b_ = &add_param("et.out.b", {t_sz});
    }
    if (cfg_.joint_et == JointEtKind::entemb || cfg_.joint_et == JointEtKind::dual) {
      et_emb_hidden_w_ = &add_param("et.emb.hidden", {h_et, static_cast<std::size_t>(d)});
      init_xavier(et_emb_hidden_w_->value, static_cast<std::size_t>(d), h_et, rng);
      et_emb_out_w_ = &add_param("et.emb.out.w", {t_sz, h_et});
      init_xavier(et_emb_out_w_->value, h_et, t_sz, rng);
      et_emb_out_b_ = &add_param("et.emb.out.b", {t_sz});
    }
  }
}

nn::Parameter& REModel::add_param(const std::string& name,
                                  std::vector<std::size_t> shape) {
  params_.push_back(std::make_unique<nn::Parameter>(name, nn::Tensor(std::move(shape))));
  return *params_.back();
}

void REModel::set_pipeline_probs(std::unordered_map<int, std::vector<double>> probs) {
  pipeline_probs_ = std::move(probs);
}

const std::vector<double>& REModel::pipeline_probs_for(int entity) const {
  auto it = pipeline_probs_.find(entity);
  if (it == pipeline_probs_.end())
    throw DataError("no entity-typing probabilities for entity '" +
                    corpus_->entities[static_cast<std::size_t>(entity)].id + "'");
  return it->second;
}

std::vector<std::string> REModel::padded_part(std::span<const std::string> tokens) const {
  std::vector<std::string> out(tokens.begin(), tokens.end());
  while (static_cast<int>(out.size()) < min_part_len_) out.push_back(emb::kPadToken);
  return out;
}

nn::Var REModel::embed_matrix(nn::Tape& tape, std::span<const std::string> tokens) {
  const auto d = static_cast<std::size_t>(table_->dim());
  nn::Tensor e({d, tokens.size()});
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    auto src = table_->row(table_->lookup_or_unk(tokens[j]));
    for (std::size_t r = 0; r < d; ++r) e.at(r, j) = src[r];
  }
  return tape.constant(std::move(e));
}

nn::Var REModel::conv_block(nn::Tape& tape, nn::Var embeds, int kpool) {
  std::vector<nn::Var> pooled;
  pooled.reserve(conv_bank_);
  for (std::size_t fi = 0; fi < conv_bank_; ++fi) {
    nn::Var map = tape.conv1d_narrow(embeds, tape.param(*params_[fi]));
    pooled.push_back(tape.kmax_pool(tape.relu(map), kpool));
  }
  return tape.concat(pooled);
}

nn::Var REModel::encode_re_context_piecewise(
    nn::Tape& tape, const data::RelationContext& ctx) {
  // Whole sentence, split of the feature map by the argument positions.
  std::vector<std::string> sentence(ctx.left.begin(), ctx.left.end());
  const std::size_t p1 = sentence.size() - 1;
  sentence.insert(sentence.end(), ctx.middle.begin() + 1, ctx.middle.end());
  const std::size_t p2 = sentence.size() - 1;
  sentence.insert(sentence.end(), ctx.right.begin() + 1, ctx.right.end());
  while (static_cast<int>(sentence.size()) < min_part_len_)
    sentence.push_back(emb::kPadToken);

  nn::Var embeds = embed_matrix(tape, sentence);
  std::vector<nn::Var> pooled;
  for (std::size_t fi = 0; fi < conv_bank_; ++fi) {
    nn::Var map = tape.relu(tape.conv1d_narrow(embeds, tape.param(*params_[fi])));
    const std::size_t len = tape.value(map).size();
    std::size_t b1 = std::clamp<std::size_t>(p1 + 1, 1, len - 2);
    std::size_t b2 = std::clamp<std::size_t>(p2, b1 + 1, len - 1);
    pooled.push_back(tape.kmax_pool(tape.slice(map, 0, b1), 1));
    pooled.push_back(tape.kmax_pool(tape.slice(map, b1, b2 - b1), 1));
    pooled.push_back(tape.kmax_pool(tape.slice(map, b2, len - b2), 1));
  }
  return tape.concat(pooled);
}

nn::Var REModel::encode_context(nn::Tape& tape, const data::RelationContext& ctx,
                                int e1, int e2) {
  switch (cfg_.encoder) {
    case REEncoder::contextwise: {
      std::vector<nn::Var> parts;
      for (const auto* span : {&ctx.left, &ctx.middle, &ctx.right}) {
        nn::Var embeds = embed_matrix(tape, padded_part(*span));
        parts.push_back(conv_block(tape, embeds, 3));
      }
      return tape.concat(parts);
    }
    case REEncoder::piecewise:
      return encode_re_context_piecewise(tape, ctx);
    case REEncoder::entemb: {
      const auto d = static_cast<std::size_t>(table_->dim());
      nn::Tensor flat({2 * d});
      auto v1 = table_->row(table_->lookup_or_unk(
          corpus_->entities[static_cast<std::size_t>(e1)].id));
      auto v2 = table_->row(table_->lookup_or_unk(
          corpus_->entities[static_cast<std::size_t>(e2)].id));
      for (std::size_t i = 0; i < d; ++i) {
        flat[i] = v1[i];
        flat[d + i] = v2[i];
      }
      return tape.constant(std::move(flat));
    }
  }
  throw std::logic_error("encode_context: bad encoder");
}

nn::Var REModel::type_repr(nn::Tape& tape, std::span<const double> probs) {
  if (probs.size() != static_cast<std::size_t>(corpus_->num_types()))
    throw std::invalid_argument("type_repr: wrong probability vector length");
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0))
      throw DataError("type_repr: probability outside [0,1]");
  }
  switch (cfg_.integration) {
    case TypeIntegration::binary: {
      // Threshold strictly above 0.5; the boundary maps to 0.
      nn::Tensor bin({probs.size()});
      for (std::size_t i = 0; i < probs.size(); ++i) bin[i] = probs[i] > 0.5 ? 1.0 : 0.0;
      return tape.constant(std::move(bin));
    }
    case TypeIntegration::binary_hidden: {
      nn::Tensor bin({probs.size()});
      for (std::size_t i = 0; i < probs.size(); ++i) bin[i] = probs[i] > 0.5 ? 1.0 : 0.0;
      return tape.tanh(tape.matvec(tape.param(*type_w_), tape.constant(std::move(bin))));
    }
    case TypeIntegration::predicted_hidden:
    case TypeIntegration::joint_train: {
      nn::Var p = tape.constant(nn::Tensor::vector({probs.begin(), probs.end()}));
      return tape.tanh(tape.matvec(tape.param(*type_w_), p));
    }
    case TypeIntegration::weighted: {
      // Fixed W_t, identity f: the representation is a constant.
      const auto d = static_cast<std::size_t>(table_->dim());
      nn::Tensor out({d});
      for (std::size_t r = 0; r < d; ++r) {
        double acc = 0.0;
        for (std::size_t t = 0; t < probs.size(); ++t)
          acc += weighted_wt_.at(r, t) * probs[t];
        out[r] = acc;
      }
      return tape.constant(std::move(out));
    }
    case TypeIntegration::none:
      throw std::invalid_argument("type_repr: integration is none");
  }
  throw std::logic_error("type_repr: bad integration");
}

void REModel::arg_window(const data::RelationContext& ctx, int arg,
                         std::vector<std::string>& left,
                         std::vector<std::string>& right) const {
  std::vector<std::string> sentence(ctx.left.begin(), ctx.left.end());
  const std::size_t p1 = sentence.size() - 1;
  sentence.insert(sentence.end(), ctx.middle.begin() + 1, ctx.middle.end());
  const std::size_t p2 = sentence.size() - 1;
  sentence.insert(sentence.end(), ctx.right.begin() + 1, ctx.right.end());
  const std::size_t pos = arg == 1 ? p1 : p2;
  const auto w = static_cast<std::size_t>(corpus_->window);

  left.assign(w, emb::kPadToken);
  for (std::size_t i = 0; i < w && i < pos; ++i)
    left[w - 1 - i] = sentence[pos - 1 - i];
  right.assign(w, emb::kPadToken);
  for (std::size_t i = 0; i < w && pos + 1 + i < sentence.size(); ++i)
    right[i] = sentence[pos + 1 + i];
}

nn::Var REModel::joint_et_probs(nn::Tape& tape, const data::RelationContext& ctx,
                                int entity, int arg) {
  nn::Var ctx_probs, emb_probs;
  const bool has_ctx = et_hidden_w_ != nullptr;
  const bool has_emb = et_emb_hidden_w_ != nullptr;
  if (has_ctx) {
    std::vector<std::string> left, right;
    arg_window(ctx, arg, left, right);
    const auto d = static_cast<std::size_t>(table_->dim());
    nn::Tensor flat({(left.size() + right.size()) * d});
    std::size_t off = 0;
    for (const auto* side : {&left, &right}) {
      for (const std::string& tok : *side) {
        auto src = table_->row(table_->lookup_or_unk(tok));
        for (std::size_t r = 0; r < d; ++r) flat[off++] = src[r];
      }
    }
    nn::Var c = tape.tanh(tape.matvec(tape.param(*et_hidden_w_),
                                      tape.constant(std::move(flat))));
    ctx_probs = tape.sigmoid(
        tape.add(tape.matvec(tape.param(*et_out_w_), c), tape.param(*et_out_b_)));
  }
  if (has_emb) {
    auto src = table_->row(table_->lookup_or_unk(
        corpus_->entities[static_cast<std::size_t>(entity)].id));
    nn::Var x = tape.constant(nn::Tensor::vector({src.begin(), src.end()}));
    nn::Var c = tape.tanh(tape.matvec(tape.param(*et_emb_hidden_w_), x));
    emb_probs = tape.sigmoid(
        tape.add(tape.matvec(tape.param(*et_emb_out_w_), c), tape.param(*et_emb_out_b_)));
  }
  if (has_ctx && has_emb)
    return tape.scale(tape.add(ctx_probs, emb_probs), 0.5);
  return has_ctx ? ctx_probs : emb_probs;
}

nn::Var REModel::relation_prob_vector(nn::Tape& tape, const data::RelationContext& ctx,
                                      int e1, int e2) {
  nn::Var phi = encode_context(tape, ctx, e1, e2);
  if (cfg_.encoder == REEncoder::piecewise)
    return tape.softmax(tape.matvec(tape.param(*w_out_), phi));

  if (cfg_.integration != TypeIntegration::none) {
    nn::Var t1, t2;
    if (cfg_.integration == TypeIntegration::joint_train) {
      t1 = tape.tanh(tape.matvec(tape.param(*type_w_), joint_et_probs(tape, ctx, e1, 1)));
      t2 = tape.tanh(tape.matvec(tape.param(*type_w_), joint_et_probs(tape, ctx, e2, 2)));
    } else {
      t1 = type_repr(tape, pipeline_probs_for(e1));
      t2 = type_repr(tape, pipeline_probs_for(e2));
    }
    phi = tape.concat({phi, t1, t2});
  }
  nn::Var c = tape.tanh(tape.matvec(tape.param(*w_hidden_), phi));
  return tape.softmax(tape.matvec(tape.param(*w_out_), c));
}

nn::Var REModel::context_loss(nn::Tape& tape, const data::RelationInstance& inst,
                              std::size_t context_index) {
  const data::RelationContext& ctx = inst.contexts[context_index];
  nn::Var probs = relation_prob_vector(tape, ctx, inst.e1, inst.e2);
  nn::Var re_cost = tape.neg_log(tape.pick(probs, static_cast<std::size_t>(inst.relation)));
  if (cfg_.integration != TypeIntegration::joint_train) return re_cost;

  // L1 + L2 + gamma * L_RE: distant-supervision typing costs for both
  // arguments on this context, not MIML.
  std::vector<nn::Var> terms;
  for (int arg = 1; arg <= 2; ++arg) {
    const int entity = arg == 1 ? inst.e1 : inst.e2;
    const auto labels =
        corpus_->label_vector(corpus_->entities[static_cast<std::size_t>(entity)]);
    std::vector<nn::Var> prob_vecs;
    if (cfg_.joint_et == JointEtKind::dual) {
      // Two separate typing costs, one per submodel.
      std::vector<std::string> left, right;
      arg_window(ctx, arg, left, right);
      const auto d = static_cast<std::size_t>(table_->dim());
      nn::Tensor flat({(left.size() + right.size()) * d});
      std::size_t off = 0;
      for (const auto* side : {&left, &right}) {
        for (const std::string& tok : *side) {
          auto src = table_->row(table_->lookup_or_unk(tok));
          for (std::size_t r = 0; r < d; ++r) flat[off++] = src[r];
        }
      }
      nn::Var c1 = tape.tanh(tape.matvec(tape.param(*et_hidden_w_),
                                         tape.constant(std::move(flat))));
      prob_vecs.push_back(tape.sigmoid(
          tape.add(tape.matvec(tape.param(*et_out_w_), c1), tape.param(*et_out_b_))));
      auto src = table_->row(table_->lookup_or_unk(
          corpus_->entities[static_cast<std::size_t>(entity)].id));
      nn::Var x = tape.constant(nn::Tensor::vector({src.begin(), src.end()}));
      nn::Var c2 = tape.tanh(tape.matvec(tape.param(*et_emb_hidden_w_), x));
      prob_vecs.push_back(tape.sigmoid(tape.add(tape.matvec(tape.param(*et_emb_out_w_), c2),
                                                tape.param(*et_emb_out_b_))));
    } else {
      prob_vecs.push_back(joint_et_probs(tape, ctx, entity, arg));
    }
    for (nn::Var pv : prob_vecs) {
      for (std::size_t t = 0; t < labels.size(); ++t)
        terms.push_back(tape.bce(labels[t] ? 1.0 : 0.0, tape.pick(pv, t)));
    }
  }
  terms.push_back(tape.scale(re_cost, cfg_.gamma));
  return tape.sum(tape.concat(terms));
}

std::vector<double> REModel::context_relation_probs(const data::RelationContext& ctx,
                                                    int e1, int e2) {
  nn::Tape tape;
  return tape.value(relation_prob_vector(tape, ctx, e1, e2)).values();
}

std::vector<double> REModel::pair_relation_probs(const data::RelationInstance& inst) {
  std::vector<double> out(static_cast<std::size_t>(num_relations_),
                          -std::numeric_limits<double>::infinity());
  for (const data::RelationContext& ctx : inst.contexts) {
    const auto probs = context_relation_probs(ctx, inst.e1, inst.e2);
    for (std::size_t r = 0; r < probs.size(); ++r) out[r] = std::max(out[r], probs[r]);
  }
  return out;
}

std::size_t REModel::argmax_context(const data::RelationInstance& inst) {
  std::size_t best = 0;
  double best_prob = -1.0;
  for (std::size_t i = 0; i < inst.contexts.size(); ++i) {
    const auto probs = context_relation_probs(inst.contexts[i], inst.e1, inst.e2);
    const double p = probs[static_cast<std::size_t>(inst.relation)];
    if (p > best_prob) {
      best_prob = p;
      best = i;
    }
  }
  return best;
}

std::vector<nn::Parameter*> REModel::parameters() {
  std::vector<nn::Parameter*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

void REModel::snapshot(std::vector<nn::Tensor>& out) const {
  out.clear();
  for (const auto& p : params_) out.push_back(p->value);
}

void REModel::restore(const std::vector<nn::Tensor>& snap) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    params_[i]->value = snap[i];
    params_[i]->zero_grad();
  }
}

RETrainResult train_re(REModel& model, const data::Corpus& corpus,
                       const std::vector<const data::RelationInstance*>& train_bags,
                       const std::vector<const data::RelationInstance*>& dev_bags,
                       std::uint64_t seed) {
  Rng rng = Rng::stream(seed, "shuffle");
  nn::AdaGrad optimizer(model.parameters(), model.config().lr);

  RETrainResult result;
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
      const data::RelationInstance& inst = *train_bags[oi];
      const std::size_t pick = model.argmax_context(inst);
      nn::Tape tape;
      nn::Var loss = model.context_loss(tape, inst, pick);
      epoch_loss += tape.value(loss).item();
      tape.backward(loss);
      optimizer.step();
    }
    if (!std::isfinite(epoch_loss))
      throw NumericalError("relation extraction training diverged (non-finite loss)");
    result.epoch_losses.push_back(epoch_loss);

    double metric = 0.0;
    if (!dev_bags.empty()) {
      const auto scores = pair_scores(model, dev_bags);
      metric = eval::pr_curve(scores, dev_bags, corpus.na_relation).area;
    }
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
  return result;
}

std::vector<eval::PairScore> pair_scores(
    REModel& model, const std::vector<const data::RelationInstance*>& bags) {
  std::vector<eval::PairScore> out;
  for (const data::RelationInstance* inst : bags) {
    const auto probs = model.pair_relation_probs(*inst);
    for (std::size_t r = 0; r < probs.size(); ++r) {
      out.push_back(eval::PairScore{inst->e1, inst->e2, static_cast<int>(r), probs[r]});
    }
  }
  return out;
}

std::vector<std::vector<double>> all_pair_probs(
    REModel& model, const std::vector<const data::RelationInstance*>& bags) {
  std::vector<std::vector<double>> out;
  out.reserve(bags.size());
  for (const data::RelationInstance* inst : bags)
    out.push_back(model.pair_relation_probs(*inst));
  return out;
}

void write_scores_file(const std::string& path, const data::Corpus& corpus,
                       std::vector<eval::PairScore> scores) {
  std::sort(scores.begin(), scores.end(),
            [](const eval::PairScore& a, const eval::PairScore& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.e1 != b.e1) return a.e1 < b.e1;
              if (a.e2 != b.e2) return a.e2 < b.e2;
              return a.relation < b.relation;
            });
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  char buf[48];
  for (const eval::PairScore& s : scores) {
    if (s.relation == corpus.na_relation) continue;
    std::snprintf(buf, sizeof(buf), "%.17g", s.score);
    out << corpus.entities[static_cast<std::size_t>(s.e1)].id << "\t"
        << corpus.entities[static_cast<std::size_t>(s.e2)].id << "\t"
        << corpus.relations[static_cast<std::size_t>(s.relation)] << "\t" << buf << "\n";
  }
}

}  // namespace bagnet::re
