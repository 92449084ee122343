#include "bagnet/embeddings.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bagnet/errors.hpp"
#include "bagnet/rng.hpp"

namespace bagnet::emb {

int EmbeddingTable::lookup(const std::string& token) const {
  auto it = index.find(token);
  return it == index.end() ? -1 : it->second;
}

int EmbeddingTable::lookup_or_unk(const std::string& token) const {
  const int i = lookup(token);
  return i >= 0 ? i : lookup(kUnkToken);
}

std::span<const double> EmbeddingTable::row(int i) const {
  return {vectors.data() + static_cast<std::size_t>(i) * vectors.cols(),
          vectors.cols()};
}

std::uint64_t EmbeddingTable::checksum() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (const auto& t : tokens) mix(Rng::fnv1a(t));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    std::uint64_t bits;
    const double v = vectors[i];
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    mix(bits);
  }
  return h;
}

std::vector<std::vector<std::string>> sentence_stream(const data::Corpus& corpus) {
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(corpus.contexts.size() + corpus.relation_instances.size());
  for (const data::Context& ctx : corpus.contexts) {
    std::vector<std::string> s;
    s.reserve(ctx.left.size() + ctx.right.size() + 1);
    s.insert(s.end(), ctx.left.begin(), ctx.left.end());
    s.push_back(corpus.entities[static_cast<std::size_t>(ctx.entity)].id);
    s.insert(s.end(), ctx.right.begin(), ctx.right.end());
    sentences.push_back(std::move(s));
  }
  for (const data::RelationInstance& inst : corpus.relation_instances) {
    for (const data::RelationContext& ctx : inst.contexts) {
      // left ends with e1 and right starts with e2; middle repeats both.
      std::vector<std::string> s(ctx.left.begin(), ctx.left.end());
      s.insert(s.end(), ctx.middle.begin() + 1, ctx.middle.end());
      s.insert(s.end(), ctx.right.begin() + 1, ctx.right.end());
      sentences.push_back(std::move(s));
    }
  }
  return sentences;
}

std::vector<std::vector<std::string>> duplicate_with_types(
    const data::Corpus& corpus, const std::vector<std::vector<std::string>>& sentences) {
  std::vector<std::vector<std::string>> out;
  out.reserve(sentences.size() * 2);
  for (const auto& sentence : sentences) {
    out.push_back(sentence);
    std::vector<std::string> typed = sentence;
    for (auto& tok : typed) {
      auto it = corpus.entity_index.find(tok);
      if (it == corpus.entity_index.end()) continue;
      const data::Entity& e = corpus.entities[static_cast<std::size_t>(it->second)];
      if (e.split == data::Split::test) continue;  // types of test entities are unknown
      tok = corpus.types[static_cast<std::size_t>(e.notable_type)];
    }
    out.push_back(std::move(typed));
  }
  return out;
}

EmbeddingTable train_embeddings(const data::Corpus& corpus,
                                const std::vector<std::vector<std::string>>& stream,
                                int dim, int window,
                                std::vector<std::string>* flagged) {
  if (stream.empty()) throw DataError("train_embeddings: empty token stream");
  EmbeddingTable table;
  auto add_token = [&table](const std::string& tok) {
    if (!table.index.count(tok)) {
      table.index[tok] = static_cast<int>(table.tokens.size());
      table.tokens.push_back(tok);
    }
  };
  add_token(kPadToken);
  add_token(kUnkToken);
  for (const auto& sentence : stream)
    for (const auto& tok : sentence) add_token(tok);
  for (const data::Entity& e : corpus.entities) add_token(e.id);
  for (const auto& t : corpus.types) add_token(t);

  const int v = table.size();
  if (v < dim)
    throw ConfigError("train_embeddings: vocabulary size " + std::to_string(v) +
                      " below embedding dimension " + std::to_string(dim) +
                      "; use a smaller dimension");

  // Symmetric-window co-occurrence counts.
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(v, v);
  for (const auto& sentence : stream) {
    std::vector<int> ids(sentence.size());
    for (std::size_t i = 0; i < sentence.size(); ++i) ids[i] = table.index[sentence[i]];
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::size_t hi = std::min(ids.size(), i + 1 + static_cast<std::size_t>(window));
      for (std::size_t j = i + 1; j < hi; ++j) {
        counts(ids[i], ids[j]) += 1.0;
        counts(ids[j], ids[i]) += 1.0;
      }
    }
  }

  const double total = counts.sum();
  if (total <= 0.0) throw DataError("train_embeddings: no co-occurrences in stream");
  Eigen::VectorXd marginals = counts.rowwise().sum();

  Eigen::MatrixXd ppmi = Eigen::MatrixXd::Zero(v, v);
  for (int i = 0; i < v; ++i) {
    if (marginals(i) <= 0.0) continue;
    for (int j = 0; j < v; ++j) {
      if (counts(i, j) <= 0.0 || marginals(j) <= 0.0) continue;
      const double pmi = std::log(counts(i, j) * total / (marginals(i) * marginals(j)));
      if (pmi > 0.0) ppmi(i, j) = pmi;
    }
  }

  // PPMI is symmetric, so the truncated factorization comes from the top-dim
  // eigenpairs; row i of U * sqrt(|lambda|) is token i's vector.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ppmi);
  if (solver.info() != Eigen::Success)
    throw NumericalError("train_embeddings: eigendecomposition failed");
  const Eigen::VectorXd& evals = solver.eigenvalues();   // ascending
  const Eigen::MatrixXd& evecs = solver.eigenvectors();

  table.vectors = nn::Tensor({static_cast<std::size_t>(v), static_cast<std::size_t>(dim)});
  for (int c = 0; c < dim; ++c) {
    const int src = v - 1 - c;
    const double scale = std::sqrt(std::max(evals(src), 0.0));
    // Deterministic sign: the largest-magnitude component is positive.
    int arg = 0;
    for (int i = 1; i < v; ++i)
      if (std::fabs(evecs(i, src)) > std::fabs(evecs(arg, src))) arg = i;
    const double sign = evecs(arg, src) < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < v; ++i)
      table.vectors.at(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) =
          sign * scale * evecs(i, src);
  }

  for (int i = 0; i < v; ++i) {
    double norm = 0.0;
    for (int c = 0; c < dim; ++c) {
      const double x = table.vectors.at(static_cast<std::size_t>(i),
                                        static_cast<std::size_t>(c));
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (int c = 0; c < dim; ++c)
        table.vectors.at(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) /= norm;
    } else if (flagged) {
      flagged->push_back(table.tokens[static_cast<std::size_t>(i)]);
    }
  }
  table.vectors.ensure_finite("embedding table");
  return table;
}

EmbeddingTable import_word2vec_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty file");
  std::istringstream hs(header);
  long long v = 0, d = 0;
  if (!(hs >> v >> d) || v <= 0 || d <= 0)
    throw DataError(path + ":1: malformed header, expected 'V d'");

  EmbeddingTable table;
  table.vectors = nn::Tensor({static_cast<std::size_t>(v), static_cast<std::size_t>(d)});
  std::string line;
  for (long long i = 0; i < v; ++i) {
    if (!std::getline(in, line))
      throw DataError(path + ": expected " + std::to_string(v) + " rows, got " +
                      std::to_string(i));
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token))
      throw DataError(path + ":" + std::to_string(i + 2) + ": missing token");
    if (table.index.count(token))
      throw DataError(path + ":" + std::to_string(i + 2) + ": duplicate token '" + token +
                      "'");
    table.index[token] = static_cast<int>(i);
    table.tokens.push_back(token);
    for (long long c = 0; c < d; ++c) {
      double x;
      if (!(ls >> x))
        throw DataError(path + ":" + std::to_string(i + 2) + ": expected " +
                        std::to_string(d) + " values");
      table.vectors.at(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) = x;
    }
    double extra;
    if (ls >> extra)
      throw DataError(path + ":" + std::to_string(i + 2) + ": more than " +
                      std::to_string(d) + " values");
  }
  table.vectors.ensure_finite("imported embeddings");
  return table;
}

void export_word2vec_text(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << table.size() << " " << table.dim() << "\n";
  char buf[64];
  for (int i = 0; i < table.size(); ++i) {
    out << table.tokens[static_cast<std::size_t>(i)];
    for (int c = 0; c < table.dim(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.6f",
                    table.vectors.at(static_cast<std::size_t>(i),
                                     static_cast<std::size_t>(c)));
      out << " " << buf;
    }
    out << "\n";
  }
}

}  // namespace bagnet::emb
