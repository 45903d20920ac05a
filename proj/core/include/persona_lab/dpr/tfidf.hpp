#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace persona_lab::dpr {

struct SparseEntry {
  std::uint32_t term = 0;
  double weight = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

/// Sorted by term id, no zero weights.
using SparseVector = std::vector<SparseEntry>;

/// Lowercases ASCII and splits on every character that is not [a-z0-9].
std::vector<std::string> tokenize(std::string_view text);

/// Dot product of two sorted sparse vectors.
double sparse_dot(const SparseVector& a, const SparseVector& b);

struct AnchorMatch {
  std::size_t document = 0;
  double score = 0.0;     // cosine similarity in [0, 1]
  bool fallback = false;  // query shares no weighted term with the corpus
};

/// TF-IDF model over a fixed document set.
///
/// tf is the raw term count, idf(t) = ln((1 + N) / (1 + df(t))) + 1, and every
/// document vector is L2-normalised (or empty when the document has no
/// tokens). Term ids follow the lexicographic order of the vocabulary.
class TfidfIndex {
 public:
  /// Throws InvalidArgument for an empty list and DegenerateCorpus when no
  /// document contains a token.
  static TfidfIndex build(std::span<const std::string> texts);

  /// Reassembles a persisted index; throws ParseError if the parts disagree.
  TfidfIndex(std::vector<std::string> vocabulary, std::vector<std::size_t> document_frequency,
             std::vector<double> idf, std::vector<SparseVector> documents);

  std::size_t num_documents() const { return documents_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const std::vector<std::size_t>& document_frequency() const { return df_; }
  const std::vector<double>& idf() const { return idf_; }
  const SparseVector& document(std::size_t i) const { return documents_.at(i); }
  const std::vector<SparseVector>& documents() const { return documents_; }
  std::optional<std::uint32_t> term_id(std::string_view term) const;

  /// Projects text onto this index's vocabulary and idf; out-of-vocabulary
  /// terms are dropped.
  SparseVector vectorize(std::string_view text) const;

  /// Cosine similarity of the query against every document.
  std::vector<double> scores(const SparseVector& query) const;

  /// argmax cosine; exact ties go to the lowest document id. A query with no
  /// overlap returns document 0, score 0 and fallback = true.
  AnchorMatch nearest(const SparseVector& query) const;
  AnchorMatch nearest(std::string_view text) const { return nearest(vectorize(text)); }

  bool operator==(const TfidfIndex& other) const {
    return vocabulary_ == other.vocabulary_ && df_ == other.df_ && idf_ == other.idf_ &&
           documents_ == other.documents_;
  }

 private:
  struct Posting {
    std::uint32_t document;
    double weight;
  };

  void build_postings();

  std::vector<std::string> vocabulary_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::vector<SparseVector> documents_;
  std::vector<std::vector<Posting>> postings_;  // by term id
};

}  // namespace persona_lab::dpr
