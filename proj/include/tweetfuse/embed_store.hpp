#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tweetfuse/preprocess.hpp"
#include "tweetfuse/tensor.hpp"

namespace tweetfuse {

/// Frozen static word vectors. Row 0 is padding and row 1 OOV, both zero;
/// word rows start at kFirstWordId.
class StaticEmbeddingTable {
 public:
  StaticEmbeddingTable() = default;
  StaticEmbeddingTable(std::vector<std::string> words, std::size_t dim, std::vector<double> word_rows);

  std::size_t dim() const { return dim_; }
  std::size_t vocab_size() const { return words_.size(); }
  std::size_t rows() const { return words_.size() + 2; }
  const Vocabulary& vocab() const { return vocab_; }
  /// Words in row order (row = index + 2).
  const std::vector<std::string>& words() const { return words_; }
  const nn::Tensor& matrix() const { return matrix_; }

  std::span<const double> row(std::int32_t id) const;

  /// SHA-256 over the matrix bytes.
  std::string checksum() const;
  /// SHA-256 over the words in row order and the dimension.
  std::string vocab_hash() const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  Vocabulary vocab_;
  nn::Tensor matrix_;
};

/// word2vec text format: "vocab_size dim" header, then "word v1 ... v_dim".
StaticEmbeddingTable load_static_embeddings(const std::string& path);
StaticEmbeddingTable read_static_embeddings(std::istream& in, const std::string& source = "<stream>");

/// Row t of the result is the table row for seq.ids[t]; shape max_len x dim.
nn::Tensor embed_sequence(const TokenSequence& seq, const StaticEmbeddingTable& table);

/// Frozen per-example contextual sentence vectors, all of length d2.
class ContextVectorStore {
 public:
  std::size_t d2() const { return d2_; }
  std::size_t size() const { return order_.size(); }
  bool contains(const std::string& id) const { return index_.contains(id); }

  /// Throws DataError for unknown ids; there is no default vector.
  std::span<const double> at(const std::string& id) const;

  void add(std::string id, std::vector<double> vector);
  const std::vector<std::string>& ids() const { return order_; }

  std::string checksum() const;

 private:
  std::size_t d2_ = 0;
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;
};

/// Per line: id<TAB>v1,v2,...,v_d2.
ContextVectorStore load_context_vectors(const std::string& path);
ContextVectorStore read_context_vectors(std::istream& in, const std::string& source = "<stream>");
void write_context_vectors(std::ostream& out, const ContextVectorStore& store);

}  // namespace tweetfuse
