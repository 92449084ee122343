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

namespace bagnet::et {

enum class EncoderKind { mlp, cnn };
enum class MimlMode { ds, miml_max, miml_avg, miml_max_avg, miml_att };
enum class Aggregation { max, avg, att };

std::string mode_name(MimlMode mode);
MimlMode parse_mode(const std::string& name);

// Aggregation used while training (MAX-AVG trains like MAX); DS has no bag
// aggregation in training, so it reports AVG here as its effective rule.
Aggregation train_aggregation(MimlMode mode);
// Aggregation used at prediction time (MAX-AVG predicts with AVG, DS too).
Aggregation predict_aggregation(MimlMode mode);

struct ETConfig {
  EncoderKind encoder = EncoderKind::cnn;
  int filters = 8;                 // n, per window width
  std::vector<int> widths = {2, 3};
  int hidden = 60;                 // h
  double lr = 0.1;
  int max_epochs = 30;
  int patience = 3;
  int qmax = 50;                   // bag-size cap during training
  bool freeze_type_vectors = false;
};

// Context encoder plus per-type sigmoid output heads; attention parameters
// are allocated only in MIML-ATT mode.
class ETModel {
 public:
  ETModel(const data::Corpus* corpus, const emb::EmbeddingTable* table,
          ETConfig cfg, MimlMode mode, std::uint64_t seed);

  const ETConfig& config() const { return cfg_; }
  MimlMode mode() const { return mode_; }
  int num_types() const { return num_types_; }
  int phi_dim() const { return phi_dim_; }
  const emb::EmbeddingTable* table() const { return table_; }

  // Tape forward: context representation c in R^h.
  nn::Var encode_context(nn::Tape& tape, const data::Context& ctx);
  // Tape forward: per-type probability vector sigma(W_out c + b).
  nn::Var context_prob_vector(nn::Tape& tape, nn::Var cvec);
  // Loss of one context under distant supervision (all entity labels).
  nn::Var context_loss(nn::Tape& tape, const data::Context& ctx,
                       std::span<const std::uint8_t> labels);
  // MIML loss of one bag with the mode's training aggregation.
  nn::Var bag_loss(nn::Tape& tape, const data::Bag& bag,
                   std::span<const int> context_ids);

  // Prediction path (no gradients). Aggregations use correctly rounded
  // summation, so bag probabilities are invariant under context permutation.
  std::vector<double> context_probs(const data::Context& ctx);
  std::vector<double> bag_probs(const std::vector<int>& context_ids, Aggregation agg);
  double bag_prob(const std::vector<int>& context_ids, int type, Aggregation agg);
  // Attention weights alpha[context][type]; each column sums to 1.
  std::vector<std::vector<double>> attention_weights(const std::vector<int>& context_ids);

  std::vector<nn::Parameter*> parameters();              // fixed order
  std::vector<nn::Parameter*> trainable_parameters();    // excludes frozen
  void snapshot(std::vector<nn::Tensor>& out) const;
  void restore(const std::vector<nn::Tensor>& snap);

 private:
  nn::Parameter& add_param(const std::string& name, std::vector<std::size_t> shape);
  nn::Var embed_matrix(nn::Tape& tape, std::span<const std::string> tokens);
  std::vector<double> encode_plain(const data::Context& ctx);

  const data::Corpus* corpus_;
  const emb::EmbeddingTable* table_;
  ETConfig cfg_;
  MimlMode mode_;
  int num_types_;
  int phi_dim_;
  std::vector<std::unique_ptr<nn::Parameter>> params_;
  nn::Parameter* w_hidden_ = nullptr;
  nn::Parameter* w_out_ = nullptr;
  nn::Parameter* b_out_ = nullptr;
  nn::Parameter* att_m_ = nullptr;
  nn::Parameter* type_vecs_ = nullptr;
};

struct TrainResult {
  std::vector<double> epoch_losses;
  std::vector<double> dev_metrics;
  int best_epoch = -1;       // 0-based; -1 when no epoch ran
  double best_dev = 0.0;
};

// Trains in place; early stopping on dev micro-F1 (tuned thresholds) under
// the training-time aggregation, patience cfg.patience, best weights kept.
TrainResult train_et(ETModel& model, const data::Corpus& corpus,
                     const std::vector<data::Bag>& train_bags,
                     const std::vector<data::Bag>& dev_bags, std::uint64_t seed);

// Bag predictions for a set of bags with the model's prediction aggregation.
eval::TypingPredictions predict_bags(ETModel& model,
                                     const std::vector<data::Bag>& bags);
eval::TypingPredictions predict_bags(ETModel& model,
                                     const std::vector<data::Bag>& bags,
                                     Aggregation agg);

// One-hidden-layer MLP over the entity's own embedding vector.
class EntEmbModel {
 public:
  EntEmbModel(const data::Corpus* corpus, const emb::EmbeddingTable* table,
              int hidden, std::uint64_t seed);

  nn::Var prob_vector(nn::Tape& tape, int entity);
  nn::Var entity_loss(nn::Tape& tape, int entity, std::span<const std::uint8_t> labels);
  std::vector<double> predict(int entity);

  std::vector<nn::Parameter*> parameters();
  void snapshot(std::vector<nn::Tensor>& out) const;
  void restore(const std::vector<nn::Tensor>& snap);

  double lr = 0.1;
  int max_epochs = 30;
  int patience = 3;

 private:
  const data::Corpus* corpus_;
  const emb::EmbeddingTable* table_;
  std::vector<std::unique_ptr<nn::Parameter>> params_;
  nn::Parameter* w_hidden_ = nullptr;
  nn::Parameter* w_out_ = nullptr;
  nn::Parameter* b_out_ = nullptr;
  bool warned_missing_ = false;
};

TrainResult train_entemb(EntEmbModel& model, const data::Corpus& corpus,
                         std::uint64_t seed);
eval::TypingPredictions predict_entities(EntEmbModel& model,
                                         const std::vector<int>& entities);

// FIGMENT-style combination: elementwise arithmetic mean of two probability
// vectors.
std::vector<double> join_models(std::span<const double> pa, std::span<const double> pb);

// Predictions file: entity_id <TAB> type_name <TAB> probability, one line per
// pair above 1e-4 plus all gold types regardless. Pipeline input to RE.
void write_predictions_file(const std::string& path, const data::Corpus& corpus,
                            const eval::TypingPredictions& preds);
std::unordered_map<int, std::vector<double>> read_predictions_file(
    const std::string& path, const data::Corpus& corpus);

// Xavier-uniform init bound sqrt(6 / (fan_in + fan_out)).
void init_xavier(nn::Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace bagnet::et
