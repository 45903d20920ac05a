#include "persona_lab/dpr/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "persona_lab/error.hpp"

namespace persona_lab::dpr {

namespace {

bool is_token_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

double smoothed_idf(std::size_t n_docs, std::size_t df) {
  return std::log(static_cast<double>(1 + n_docs) / static_cast<double>(1 + df)) + 1.0;
}

void normalize(SparseVector& v) {
  double norm_sq = 0.0;
  for (const SparseEntry& e : v) norm_sq += e.weight * e.weight;
  if (norm_sq == 0.0) {
    v.clear();
    return;
  }
  const double norm = std::sqrt(norm_sq);
  for (SparseEntry& e : v) e.weight /= norm;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    char c = lower(raw);
    if (is_token_char(c)) {
      current += c;
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double sparse_dot(const SparseVector& a, const SparseVector& b) {
  double dot = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->term < ib->term) {
      ++ia;
    } else if (ib->term < ia->term) {
      ++ib;
    } else {
      dot += ia->weight * ib->weight;
      ++ia;
      ++ib;
    }
  }
  return dot;
}

TfidfIndex TfidfIndex::build(std::span<const std::string> texts) {
  if (texts.empty()) throw InvalidArgument("cannot index an empty document list");

  std::vector<std::map<std::string, std::size_t>> counts(texts.size());
  std::map<std::string, std::size_t> df_by_term;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (std::string& tok : tokenize(texts[i])) ++counts[i][std::move(tok)];
    for (const auto& [term, c] : counts[i]) ++df_by_term[term];
  }
  if (df_by_term.empty()) throw DegenerateCorpus("no document contains a token");

  std::vector<std::string> vocabulary;
  std::vector<std::size_t> df;
  std::vector<double> idf;
  for (const auto& [term, count] : df_by_term) {
    vocabulary.push_back(term);
    df.push_back(count);
    idf.push_back(smoothed_idf(texts.size(), count));
  }

  std::vector<SparseVector> docs(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (const auto& [term, tf] : counts[i]) {
      auto id = static_cast<std::uint32_t>(
          std::lower_bound(vocabulary.begin(), vocabulary.end(), term) - vocabulary.begin());
      docs[i].push_back({id, static_cast<double>(tf) * idf[id]});
    }
    normalize(docs[i]);
  }
  return TfidfIndex(std::move(vocabulary), std::move(df), std::move(idf), std::move(docs));
}

TfidfIndex::TfidfIndex(std::vector<std::string> vocabulary,
                       std::vector<std::size_t> document_frequency, std::vector<double> idf,
                       std::vector<SparseVector> documents)
    : vocabulary_(std::move(vocabulary)),
      df_(std::move(document_frequency)),
      idf_(std::move(idf)),
      documents_(std::move(documents)) {
  if (documents_.empty()) throw ParseError("tf-idf index has no documents");
  if (df_.size() != vocabulary_.size() || idf_.size() != vocabulary_.size()) {
    throw ParseError("tf-idf vocabulary, df and idf tables differ in length");
  }
  if (!std::is_sorted(vocabulary_.begin(), vocabulary_.end()) ||
      std::adjacent_find(vocabulary_.begin(), vocabulary_.end()) != vocabulary_.end()) {
    throw ParseError("tf-idf vocabulary must be sorted and unique");
  }
  for (double w : idf_) {
    if (!(w > 0.0)) throw ParseError("idf weights must be strictly positive");
  }
  for (const SparseVector& doc : documents_) {
    for (std::size_t k = 0; k < doc.size(); ++k) {
      if (doc[k].term >= vocabulary_.size() || (k > 0 && doc[k - 1].term >= doc[k].term)) {
        throw ParseError("document vector terms out of range or unsorted");
      }
    }
  }
  build_postings();
}

void TfidfIndex::build_postings() {
  postings_.assign(vocabulary_.size(), {});
  for (std::size_t d = 0; d < documents_.size(); ++d) {
    for (const SparseEntry& e : documents_[d]) {
      postings_[e.term].push_back({static_cast<std::uint32_t>(d), e.weight});
    }
  }
}

std::optional<std::uint32_t> TfidfIndex::term_id(std::string_view term) const {
  auto it = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), term);
  if (it == vocabulary_.end() || *it != term) return std::nullopt;
  return static_cast<std::uint32_t>(it - vocabulary_.begin());
}

SparseVector TfidfIndex::vectorize(std::string_view text) const {
  std::map<std::uint32_t, std::size_t> tf;
  for (const std::string& tok : tokenize(text)) {
    if (auto id = term_id(tok)) ++tf[*id];
  }
  SparseVector v;
  v.reserve(tf.size());
  for (const auto& [id, count] : tf) v.push_back({id, static_cast<double>(count) * idf_[id]});
  normalize(v);
  return v;
}

std::vector<double> TfidfIndex::scores(const SparseVector& query) const {
  std::vector<double> acc(documents_.size(), 0.0);
  for (const SparseEntry& q : query) {
    for (const Posting& p : postings_.at(q.term)) acc[p.document] += q.weight * p.weight;
  }
  for (double& s : acc) s = std::clamp(s, 0.0, 1.0);
  return acc;
}

AnchorMatch TfidfIndex::nearest(const SparseVector& query) const {
  const auto all = scores(query);
  AnchorMatch best;
  for (std::size_t d = 0; d < all.size(); ++d) {
    if (all[d] > best.score) {
      best.document = d;
      best.score = all[d];
    }
  }
  best.fallback = best.score == 0.0;
  return best;
}

}  // namespace persona_lab::dpr
