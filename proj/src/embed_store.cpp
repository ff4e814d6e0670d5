#include "tweetfuse/embed_store.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "tweetfuse/error.hpp"
#include "tweetfuse/hashing.hpp"

namespace tweetfuse {

namespace {

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) parts.push_back(line.substr(start, i - start));
  }
  return parts;
}

}  // namespace

StaticEmbeddingTable::StaticEmbeddingTable(std::vector<std::string> words, std::size_t dim,
                                           std::vector<double> word_rows)
    : dim_(dim), words_(std::move(words)), matrix_({words_.size() + 2, dim}, 0.0) {
  if (dim_ == 0) throw DataError("embedding dimension must be positive");
  if (word_rows.size() != words_.size() * dim_) {
    throw DataError("embedding matrix has " + std::to_string(word_rows.size()) +
                    " values, expected " + std::to_string(words_.size() * dim_));
  }
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (!vocab_.emplace(words_[w], static_cast<std::int32_t>(w) + kFirstWordId).second) {
      throw DataError("duplicate embedding word '" + words_[w] + "'");
    }
  }
  nn::require_finite(word_rows, "static embeddings");
  std::copy(word_rows.begin(), word_rows.end(), matrix_.data() + 2 * dim_);
}

std::span<const double> StaticEmbeddingTable::row(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= rows()) {
    throw DataError("token id " + std::to_string(id) + " out of range for table with " +
                    std::to_string(rows()) + " rows");
  }
  return matrix_.values().subspan(static_cast<std::size_t>(id) * dim_, dim_);
}

std::string StaticEmbeddingTable::checksum() const {
  Sha256 h;
  h.update(matrix_.values());
  return h.hex_digest();
}

std::string StaticEmbeddingTable::vocab_hash() const {
  Sha256 h;
  h.update(std::to_string(dim_));
  for (const auto& w : words_) {
    h.update("\n");
    h.update(w);
  }
  return h.hex_digest();
}

StaticEmbeddingTable read_static_embeddings(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_spaces(line);
  std::size_t declared = 0, dim = 0;
  if (header.size() != 2 || !parse_size(header[0], declared) || !parse_size(header[1], dim) || dim == 0) {
    throw DataError(source + ": malformed header '" + line + "', expected 'vocab_size dim'");
  }

  std::vector<std::string> words;
  std::vector<double> values;
  words.reserve(declared);
  values.reserve(declared * dim);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto parts = split_spaces(line);
    if (parts.empty()) continue;
    const std::string word(parts[0]);
    const std::string ctx = source + ": line " + std::to_string(lineno) + " (word '" + word + "')";
    if (parts.size() - 1 != dim) {
      throw DataError(ctx + ": has " + std::to_string(parts.size() - 1) + " values, header dim is " +
                      std::to_string(dim));
    }
    for (std::size_t k = 1; k < parts.size(); ++k) {
      double v;
      if (!parse_double(parts[k], v)) throw DataError(ctx + ": bad number '" + std::string(parts[k]) + "'");
      if (!std::isfinite(v)) throw DataError(ctx + ": non-finite value");
      values.push_back(v);
    }
    words.push_back(word);
  }
  if (words.size() != declared) {
    throw DataError(source + ": header declares " + std::to_string(declared) + " words, found " +
                    std::to_string(words.size()));
  }
  return StaticEmbeddingTable(std::move(words), dim, std::move(values));
}

StaticEmbeddingTable load_static_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file " + path);
  return read_static_embeddings(in, path);
}

nn::Tensor embed_sequence(const TokenSequence& seq, const StaticEmbeddingTable& table) {
  nn::Tensor out({seq.ids.size(), table.dim()});
  for (std::size_t t = 0; t < seq.ids.size(); ++t) {
    const auto row = table.row(seq.ids[t]);
    std::copy(row.begin(), row.end(), out.data() + t * table.dim());
  }
  return out;
}

std::span<const double> ContextVectorStore::at(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw DataError("no context vector for example '" + id + "'");
  return std::span<const double>(data_).subspan(it->second * d2_, d2_);
}

void ContextVectorStore::add(std::string id, std::vector<double> vector) {
  if (vector.empty()) throw DataError("empty context vector for '" + id + "'");
  if (order_.empty()) {
    d2_ = vector.size();
  } else if (vector.size() != d2_) {
    throw DataError("context vector for '" + id + "' has length " + std::to_string(vector.size()) +
                    ", expected " + std::to_string(d2_));
  }
  for (double v : vector) {
    if (!std::isfinite(v)) throw DataError("non-finite value in context vector for '" + id + "'");
  }
  if (index_.contains(id)) throw DataError("duplicate context vector id '" + id + "'");
  index_.emplace(id, order_.size());
  order_.push_back(std::move(id));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

std::string ContextVectorStore::checksum() const {
  Sha256 h;
  for (const auto& id : order_) {
    h.update(id);
    h.update("\n");
  }
  h.update(std::span<const double>(data_));
  return h.hex_digest();
}

ContextVectorStore read_context_vectors(std::istream& in, const std::string& source) {
  ContextVectorStore store;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string ctx = source + ": line " + std::to_string(lineno);
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw DataError(ctx + ": expected id<TAB>values");
    std::string id = line.substr(0, tab);
    std::vector<double> values;
    std::string_view rest(line);
    rest.remove_prefix(tab + 1);
    while (true) {
      const auto comma = rest.find(',');
      const auto item = rest.substr(0, comma);
      double v;
      if (!parse_double(item, v)) {
        throw DataError(ctx + " (id '" + id + "'): bad number '" + std::string(item) + "'");
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    try {
      store.add(std::move(id), std::move(values));
    } catch (const DataError& e) {
      throw DataError(ctx + ": " + e.what());
    }
  }
  return store;
}

ContextVectorStore load_context_vectors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open context-vector file " + path);
  return read_context_vectors(in, path);
}

void write_context_vectors(std::ostream& out, const ContextVectorStore& store) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& id : store.ids()) {
    const auto v = store.at(id);
    out << id << '\t';
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k) out << ',';
      out << v[k];
    }
    out << '\n';
  }
}

}  // namespace tweetfuse
