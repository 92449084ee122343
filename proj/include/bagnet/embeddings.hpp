#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bagnet/corpus.hpp"
#include "bagnet/tensor.hpp"

namespace bagnet::emb {

inline constexpr const char* kPadToken = "<PAD>";
inline constexpr const char* kUnkToken = "<UNK>";

// Word, entity and type vectors in one space. Immutable once trained and
// kept fixed during model training (asserted via checksum()).
struct EmbeddingTable {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;
  nn::Tensor vectors;  // V x d

  int dim() const { return static_cast<int>(vectors.cols()); }
  int size() const { return static_cast<int>(tokens.size()); }
  int lookup(const std::string& token) const;      // -1 when absent
  int lookup_or_unk(const std::string& token) const;
  std::span<const double> row(int i) const;
  std::uint64_t checksum() const;
};

// One sentence per ET context (left + entity + right) and per relation
// context; input material for the embedding trainer.
std::vector<std::vector<std::string>> sentence_stream(const data::Corpus& corpus);

// Two copies of every sentence: the sentence itself, and a copy in which
// each train/dev entity is replaced by its notable-type token. Test entities
// are never replaced.
std::vector<std::vector<std::string>> duplicate_with_types(
    const data::Corpus& corpus, const std::vector<std::vector<std::string>>& sentences);

// PPMI co-occurrence counts over a symmetric window, factorized by truncated
// eigendecomposition to rank `dim`; rows L2-normalized. The vocabulary is
// the stream's tokens plus all entity ids, type names, <PAD> and <UNK>.
// Tokens that never co-occur keep a zero vector and are reported via
// *flagged when given.
EmbeddingTable train_embeddings(const data::Corpus& corpus,
                                const std::vector<std::vector<std::string>>& stream,
                                int dim, int window = 5,
                                std::vector<std::string>* flagged = nullptr);

// Text format: first line "V d", then one "token v1 ... vd" line per token.
EmbeddingTable import_word2vec_text(const std::string& path);
void export_word2vec_text(const EmbeddingTable& table, const std::string& path);

}  // namespace bagnet::emb
