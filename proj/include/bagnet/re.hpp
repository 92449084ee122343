#pragma once

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bagnet/autograd.hpp"
#include "bagnet/corpus.hpp"
#include "bagnet/embeddings.hpp"
#include "bagnet/eval.hpp"

namespace bagnet::re {

enum class REEncoder { contextwise, piecewise, entemb };
enum class TypeIntegration { none, binary, binary_hidden, predicted_hidden, weighted, joint_train };
enum class JointEtKind { context_mlp, entemb, dual };

std::string encoder_name(REEncoder e);
REEncoder parse_encoder(const std::string& name);
std::string integration_name(TypeIntegration i);
TypeIntegration parse_integration(const std::string& name);
std::string joint_et_name(JointEtKind k);
JointEtKind parse_joint_et(const std::string& name);

struct REConfig {
  REEncoder encoder = REEncoder::contextwise;
  TypeIntegration integration = TypeIntegration::none;
  JointEtKind joint_et = JointEtKind::context_mlp;
  int filters = 8;                 // n, per window width
  std::vector<int> widths = {2, 3};
  int hidden = 60;                 // h
  int et_hidden = 30;              // joint ET submodel hidden size
  int tau = 50;                    // type-representation size for hidden variants
  double gamma = 1.0;              // joint RE-cost weight
  double lr = 0.1;
  int max_epochs = 30;
  int patience = 3;
};

// Multi-instance relation model: contextwise or piecewise CNN (or the
// argument-embedding baseline), optional entity-type integration, optional
// embedded entity-typing submodel for joint training.
class REModel {
 public:
  REModel(const data::Corpus* corpus, const emb::EmbeddingTable* table, REConfig cfg,
          std::uint64_t seed);

  const REConfig& config() const { return cfg_; }
  int num_relations() const { return num_relations_; }  // including NA
  int phi_dim() const { return phi_dim_; }
  int tau() const { return tau_; }

  // Entity-level type probabilities for the pipeline integrations.
  void set_pipeline_probs(std::unordered_map<int, std::vector<double>> probs);

  // Tape forward: encoder feature vector phi(c).
  nn::Var encode_context(nn::Tape& tape, const data::RelationContext& ctx,
                         int e1, int e2);
  // Type representation from an entity-level probability vector (pipeline).
  nn::Var type_repr(nn::Tape& tape, std::span<const double> probs);
  // Tape forward: (R+1) relation probability vector for one context.
  nn::Var relation_prob_vector(nn::Tape& tape, const data::RelationContext& ctx,
                               int e1, int e2);
  // Training loss on one context of an instance: -log P(r(z)|c) plus, for
  // joint training, the two distant-supervision typing costs.
  nn::Var context_loss(nn::Tape& tape, const data::RelationInstance& inst,
                       std::size_t context_index);

  // Prediction path (no gradients).
  std::vector<double> context_relation_probs(const data::RelationContext& ctx,
                                             int e1, int e2);
  // P(r|z) = max over contexts of P(r|c_i), per relation.
  std::vector<double> pair_relation_probs(const data::RelationInstance& inst);
  // Index of the context maximizing the gold relation's probability.
  std::size_t argmax_context(const data::RelationInstance& inst);

  // Joint ET submodel typing probabilities for one argument of a context
  // (arg is 1 or 2); exposed for the joint-training tests.
  nn::Var joint_et_probs(nn::Tape& tape, const data::RelationContext& ctx,
                         int entity, int arg);

  std::vector<nn::Parameter*> parameters();
  void snapshot(std::vector<nn::Tensor>& out) const;
  void restore(const std::vector<nn::Tensor>& snap);

 private:
  nn::Parameter& add_param(const std::string& name, std::vector<std::size_t> shape);
  std::vector<std::string> padded_part(std::span<const std::string> tokens) const;
  nn::Var embed_matrix(nn::Tape& tape, std::span<const std::string> tokens);
  nn::Var conv_block(nn::Tape& tape, nn::Var embeds, int kpool);
  nn::Var encode_re_context_piecewise(nn::Tape& tape, const data::RelationContext& ctx);
  const std::vector<double>& pipeline_probs_for(int entity) const;
  void arg_window(const data::RelationContext& ctx, int arg,
                  std::vector<std::string>& left, std::vector<std::string>& right) const;

  const data::Corpus* corpus_;
  const emb::EmbeddingTable* table_;
  REConfig cfg_;
  int num_relations_;
  int phi_dim_;
  int tau_;
  int min_part_len_;
  std::vector<std::unique_ptr<nn::Parameter>> params_;
  std::size_t conv_bank_ = 0;  // filters live in params_[0..conv_bank_)
  nn::Parameter* w_hidden_ = nullptr;
  nn::Parameter* w_out_ = nullptr;
  nn::Parameter* type_w_ = nullptr;          // learned W_t
  nn::Tensor weighted_wt_;                   // fixed W_t (type-embedding columns)
  nn::Parameter* et_hidden_w_ = nullptr;     // joint context-MLP submodel
  nn::Parameter* et_out_w_ = nullptr;
  nn::Parameter* et_out_b_ = nullptr;
  nn::Parameter* et_emb_hidden_w_ = nullptr;  // joint EntEmb submodel
  nn::Parameter* et_emb_out_w_ = nullptr;
  nn::Parameter* et_emb_out_b_ = nullptr;
  std::unordered_map<int, std::vector<double>> pipeline_probs_;
};

struct RETrainResult {
  std::vector<double> epoch_losses;
  std::vector<double> dev_metrics;  // dev PR area per epoch
  int best_epoch = -1;
  double best_dev = 0.0;
};

// MI-max training: per bag, the gradient flows through the context that
// maximizes the gold relation's probability. Early stopping on dev PR area.
RETrainResult train_re(REModel& model, const data::Corpus& corpus,
                       const std::vector<const data::RelationInstance*>& train_bags,
                       const std::vector<const data::RelationInstance*>& dev_bags,
                       std::uint64_t seed);

// Per-pair scores for the PR curve (non-NA relations only).
std::vector<eval::PairScore> pair_scores(
    REModel& model, const std::vector<const data::RelationInstance*>& bags);
std::vector<std::vector<double>> all_pair_probs(
    REModel& model, const std::vector<const data::RelationInstance*>& bags);

void write_scores_file(const std::string& path, const data::Corpus& corpus,
                       std::vector<eval::PairScore> scores);

}  // namespace bagnet::re
