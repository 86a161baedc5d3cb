// Copyright 2026, the gafim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gafim/error.hpp"
#include "gafim/itemset.hpp"

namespace gafim {

/// Immutable n x d binary transaction matrix.
///
/// Rows are kept both as Itemsets and as one flat word array (row-major) for
/// scanning many candidates against each row. Each item also gets a column
/// bitmap over transactions so a single itemset's support is the popcount of
/// the AND of its columns.
class TransactionDatabase {
 public:
  TransactionDatabase(std::size_t item_count, std::vector<Itemset> rows,
                      std::string source_label = {},
                      std::vector<std::string> item_labels = {})
      : d_(item_count),
        rows_(std::move(rows)),
        source_label_(std::move(source_label)),
        item_labels_(std::move(item_labels)) {
    if (d_ == 0 || d_ > kMaxItems) {
      throw UsageError("item count must be in [1, " + std::to_string(kMaxItems) + "]");
    }
    if (rows_.empty()) throw UsageError("a transaction database needs at least one row");
    if (!item_labels_.empty() && item_labels_.size() != d_) {
      throw UsageError("item label count does not match item count");
    }
    row_words_ = words_for(d_);
    flat_.reserve(rows_.size() * row_words_);
    for (const auto& r : rows_) {
      if (r.width() != d_) throw UsageError("row width does not match item count");
      flat_.insert(flat_.end(), r.words().begin(), r.words().end());
    }
    const std::size_t col_words = words_for(rows_.size());
    columns_.assign(d_, std::vector<Word>(col_words, 0));
    for (std::size_t t = 0; t < rows_.size(); ++t) {
      rows_[t].for_each_position([&](std::size_t pos) {
        columns_[pos][t / kWordBits] |= Word{1} << (t % kWordBits);
      });
    }
  }

  std::size_t n() const noexcept { return rows_.size(); }
  std::size_t d() const noexcept { return d_; }
  const std::vector<Itemset>& rows() const noexcept { return rows_; }
  const Itemset& row(std::size_t t) const { return rows_.at(t); }
  const std::string& source_label() const noexcept { return source_label_; }
  const std::vector<std::string>& item_labels() const noexcept { return item_labels_; }

  std::size_t words_per_row() const noexcept { return row_words_; }
  std::span<const Word> row_words(std::size_t t) const {
    return std::span<const Word>(flat_).subspan(t * row_words_, row_words_);
  }

  /// Transactions containing item at 0-based position `pos`, as a bitmap over rows.
  std::span<const Word> column(std::size_t pos) const { return columns_.at(pos); }

  /// Same logical data (labels are presentation only).
  friend bool operator==(const TransactionDatabase& a, const TransactionDatabase& b) {
    return a.d_ == b.d_ && a.rows_ == b.rows_;
  }

 private:
  std::size_t d_;
  std::vector<Itemset> rows_;
  std::string source_label_;
  std::vector<std::string> item_labels_;
  std::size_t row_words_ = 0;
  std::vector<Word> flat_;
  std::vector<std::vector<Word>> columns_;
};

/// Minimum support expressed both as the user's fraction and as the integer
/// threshold every comparison actually uses.
class MiningParams {
 public:
  MiningParams(double sigma, std::size_t transaction_count) : sigma_(sigma), n_(transaction_count) {
    if (!(sigma > 0.0 && sigma <= 1.0)) {
      throw UsageError("minimum support must lie in (0, 1], got " + std::to_string(sigma));
    }
    if (n_ == 0) throw UsageError("transaction count must be positive");
    // Smallest c with c / n >= sigma, computed in the same double arithmetic
    // used to report fractions so the two never disagree at the boundary.
    auto meets = [&](std::size_t c) {
      return static_cast<double>(c) / static_cast<double>(n_) >= sigma_;
    };
    auto c = static_cast<std::size_t>(std::ceil(sigma_ * static_cast<double>(n_)));
    c = std::clamp<std::size_t>(c, 1, n_);
    while (c > 1 && meets(c - 1)) --c;
    while (c < n_ && !meets(c)) ++c;
    min_count_ = c;
  }

  MiningParams(double sigma, const TransactionDatabase& db) : MiningParams(sigma, db.n()) {}

  double sigma() const noexcept { return sigma_; }
  std::size_t min_count() const noexcept { return min_count_; }
  std::size_t transaction_count() const noexcept { return n_; }

 private:
  double sigma_;
  std::size_t n_;
  std::size_t min_count_ = 1;
};

inline void require_width(const TransactionDatabase& db, const Itemset& x) {
  if (x.width() != db.d()) {
    throw UsageError("itemset width " + std::to_string(x.width()) +
                     " does not match database item count " + std::to_string(db.d()));
  }
}

/// Number of transactions containing x (n for the empty itemset).
inline std::size_t support_count(const TransactionDatabase& db, const Itemset& x) {
  require_width(db, x);
  if (x.empty()) return db.n();
  std::vector<Word> acc;
  bool first = true;
  x.for_each_position([&](std::size_t pos) {
    auto col = db.column(pos);
    if (first) {
      acc.assign(col.begin(), col.end());
      first = false;
    } else {
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] &= col[i];
    }
  });
  std::size_t c = 0;
  for (Word w : acc) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

inline double support(const TransactionDatabase& db, const Itemset& x) {
  return static_cast<double>(support_count(db, x)) / static_cast<double>(db.n());
}

inline bool is_frequent(const TransactionDatabase& db, const Itemset& x, const MiningParams& p) {
  return support_count(db, x) >= p.min_count();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Splits on '\n'; a trailing newline terminates the last line rather than
// starting a new empty one. '\r' before '\n' is dropped.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  const char sep = line.find(',') != std::string_view::npos ? ',' : '\t';
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

inline bool is_numeric(std::string_view tok) {
  if (tok.empty()) return false;
  std::size_t i = (tok.front() == '-' || tok.front() == '+') ? 1 : 0;
  if (i == tok.size()) return false;
  for (; i < tok.size(); ++i) {
    if (tok[i] < '0' || tok[i] > '9') return false;
  }
  return true;
}

}  // namespace detail

/// Dense format: one transaction per line, '0'/'1' tokens separated by ','
/// or tab. The first line is a header of item labels when any of its tokens
/// is non-numeric.
inline TransactionDatabase load_binary_matrix(std::string_view text, std::string source_label = {}) {
  auto lines = detail::split_lines(text);
  while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(0, "input contains no data");

  std::vector<std::string> labels;
  std::size_t first_data = 0;
  {
    auto head = detail::split_fields(lines[0]);
    if (std::any_of(head.begin(), head.end(), [](auto t) { return !detail::is_numeric(t); })) {
      for (auto t : head) labels.emplace_back(t);
      first_data = 1;
    }
  }
  if (first_data == lines.size()) throw ParseError(0, "input contains a header but no data rows");

  std::size_t d = 0;
  std::vector<std::vector<bool>> bits;
  for (std::size_t li = first_data; li < lines.size(); ++li) {
    const std::size_t lineno = li + 1;
    if (detail::trim(lines[li]).empty()) throw ParseError(lineno, "empty row in dense matrix");
    auto toks = detail::split_fields(lines[li]);
    if (d == 0) {
      d = toks.size();
      if (!labels.empty() && labels.size() != d) {
        throw ParseError(lineno, "row has " + std::to_string(d) + " values but header has " +
                                     std::to_string(labels.size()) + " labels");
      }
      if (d > kMaxItems) throw ParseError(lineno, "too many items (max " + std::to_string(kMaxItems) + ")");
    } else if (toks.size() != d) {
      throw ParseError(lineno, "ragged row: expected " + std::to_string(d) + " values, found " +
                                   std::to_string(toks.size()));
    }
    std::vector<bool> row(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (toks[j] == "1") {
        row[j] = true;
      } else if (toks[j] != "0") {
        throw ParseError(lineno, "invalid token '" + std::string(toks[j]) + "' in column " +
                                     std::to_string(j + 1) + " (expected 0 or 1)");
      }
    }
    bits.push_back(std::move(row));
  }

  std::vector<Itemset> rows;
  rows.reserve(bits.size());
  for (const auto& b : bits) {
    Itemset s(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (b[j]) s.set(j);
    }
    rows.push_back(std::move(s));
  }
  return TransactionDatabase(d, std::move(rows), std::move(source_label), std::move(labels));
}

/// Sparse format: one transaction per line, whitespace-separated 1-based item
/// ids. An empty line is an empty transaction. d is the largest id seen
/// unless `item_count` overrides it.
inline TransactionDatabase load_transaction_list(std::string_view text,
                                                 std::optional<std::size_t> item_count = std::nullopt,
                                                 std::string source_label = {}) {
  if (item_count && (*item_count == 0 || *item_count > kMaxItems)) {
    throw UsageError("item count override must be in [1, " + std::to_string(kMaxItems) + "]");
  }
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError(0, "input contains no data");

  std::vector<std::vector<std::size_t>> id_rows;
  std::size_t max_id = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t lineno = li + 1;
    std::vector<std::size_t> ids;
    std::string_view rest = lines[li];
    while (true) {
      while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t' || rest.front() == '\r')) {
        rest.remove_prefix(1);
      }
      if (rest.empty()) break;
      std::size_t end = 0;
      while (end < rest.size() && rest[end] != ' ' && rest[end] != '\t' && rest[end] != '\r') ++end;
      const std::string_view tok = rest.substr(0, end);
      rest.remove_prefix(end);
      if (!tok.empty() && tok.front() == '-') {
        throw ParseError(lineno, "negative item id '" + std::string(tok) + "'");
      }
      std::size_t id = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
      if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError(lineno, "invalid item id '" + std::string(tok) + "'");
      }
      if (id == 0) throw ParseError(lineno, "item ids are 1-based; found 0");
      if (item_count && id > *item_count) {
        throw ParseError(lineno, "item id " + std::to_string(id) + " exceeds item count " +
                                     std::to_string(*item_count));
      }
      if (id > kMaxItems) throw ParseError(lineno, "item id exceeds " + std::to_string(kMaxItems));
      max_id = std::max(max_id, id);
      ids.push_back(id);
    }
    id_rows.push_back(std::move(ids));
  }

  const std::size_t d = item_count.value_or(max_id);
  if (d == 0) throw ParseError(0, "no item ids found and no item count given");
  std::vector<Itemset> rows;
  rows.reserve(id_rows.size());
  for (const auto& ids : id_rows) rows.push_back(Itemset::from_ids(d, ids));
  return TransactionDatabase(d, std::move(rows), std::move(source_label));
}

/// Inverse of load_binary_matrix: comma-separated, '\n'-terminated lines,
/// preceded by the label header when the database carries labels.
inline std::string serialize_dense(const TransactionDatabase& db) {
  std::string out;
  out.reserve((db.n() + 1) * db.d() * 2);
  if (!db.item_labels().empty()) {
    for (std::size_t j = 0; j < db.d(); ++j) {
      if (j) out += ',';
      out += db.item_labels()[j];
    }
    out += '\n';
  }
  for (const auto& r : db.rows()) {
    for (std::size_t j = 0; j < db.d(); ++j) {
      if (j) out += ',';
      out += r.test(j) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

inline std::string serialize_sparse(const TransactionDatabase& db) {
  std::string out;
  for (const auto& r : db.rows()) {
    bool first = true;
    r.for_each_position([&](std::size_t pos) {
      if (!first) out += ' ';
      out += std::to_string(pos + 1);
      first = false;
    });
    out += '\n';
  }
  return out;
}

enum class InputFormat { dense, sparse };

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open input file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline TransactionDatabase load_database_file(const std::string& path, InputFormat format,
                                              std::optional<std::size_t> item_count = std::nullopt) {
  const std::string text = read_text_file(path);
  return format == InputFormat::dense ? load_binary_matrix(text, path)
                                      : load_transaction_list(text, item_count, path);
}

}  // namespace gafim
