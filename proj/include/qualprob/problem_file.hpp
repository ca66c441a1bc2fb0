#pragma once

#include <fstream>
#include <map>
#include <set>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qualprob/axioms.hpp"
#include "qualprob/ordering.hpp"

namespace qualprob {

/// A parse failure located in a problem file. Lines and columns are 1-based;
/// columns count bytes.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, std::size_t column, const std::string& message,
             ErrorCode code = ErrorCode::SyntaxError)
      : Error(code,
              file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        file_(std::move(file)),
        line_(line),
        column_(column) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string file_;
  std::size_t line_, column_;
};

struct ProblemFile {
  std::string name;
  SpaceRef space;
  std::vector<Event> certain_true;
  std::vector<Event> certain_false;
  std::optional<CompleteOrdering> complete;
  std::optional<PartialOrdering> partial;
  std::optional<ConditionalStructure> conditional;
};

/// Parses `atoms: x y` or `worlds: w1 w2`. Errors carry the byte offset of
/// the offending token.
inline SpaceRef parse_space_declaration(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::InvalidSpace, "expected 'atoms:' or 'worlds:'", 0);
  }
  auto head = text.substr(0, colon);
  while (!head.empty() && std::isspace(static_cast<unsigned char>(head.back()))) head.remove_suffix(1);
  std::size_t lead = 0;
  while (lead < head.size() && std::isspace(static_cast<unsigned char>(head[lead]))) ++lead;
  head.remove_prefix(lead);
  if (head != "atoms" && head != "worlds") {
    throw Error(ErrorCode::InvalidSpace, "expected 'atoms:' or 'worlds:'", lead);
  }
  std::vector<std::string> names;
  std::size_t pos = colon + 1;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) break;
    std::string name(text.substr(start, pos - start));
    if (!Space::is_identifier(name)) {
      throw Error(ErrorCode::InvalidSpace, "'" + name + "' is not an identifier", start);
    }
    if (Space::is_reserved(name)) {
      throw Error(ErrorCode::InvalidSpace, "'" + name + "' is a reserved word", start);
    }
    if (std::find(names.begin(), names.end(), name) != names.end()) {
      throw Error(ErrorCode::InvalidSpace, "duplicate name '" + name + "'", start);
    }
    names.push_back(std::move(name));
  }
  return head == "atoms" ? Space::atoms(std::move(names)) : Space::worlds(std::move(names));
}

namespace detail {

class ProblemParser {
 public:
  ProblemParser(std::string_view text, std::string name) : text_(text), name_(std::move(name)) {}

  ProblemFile run() {
    ProblemFile out;
    out.name = name_;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text_.size()) {
      auto end = text_.find('\n', pos);
      if (end == std::string_view::npos) end = text_.size();
      ++line_no;
      handle_line(out, text_.substr(pos, end - pos), line_no);
      pos = end + 1;
    }
    finish(out);
    return out;
  }

 private:
  enum class Section { None, CertainTrue, CertainFalse, Order, Ranks, Cond };

  struct Line {
    std::string_view text;  // comment stripped, right-trimmed
    std::size_t number;
  };

  struct CondRelation {
    std::pair<Mask, Mask> lhs, rhs;
    Relation rel;
    std::size_t line;
  };

  [[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& message,
                         ErrorCode code = ErrorCode::SyntaxError) const {
    throw ParseError(name_, line, column, message, code);
  }

  static std::size_t skip_space(std::string_view s, std::size_t pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos;
  }

  static std::string_view trim_right(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }

  void handle_line(ProblemFile& out, std::string_view raw, std::size_t number) {
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim_right(raw);
    std::size_t start = skip_space(raw, 0);
    if (start == raw.size()) return;
    Line line{raw, number};

    // Section headers: an identifier immediately followed by ':'.
    std::size_t k = start;
    while (k < raw.size() && (std::isalnum(static_cast<unsigned char>(raw[k])) || raw[k] == '_')) ++k;
    std::string_view word = raw.substr(start, k - start);
    bool header = k < raw.size() && raw[k] == ':' && k > start;
    if (header && (word == "atoms" || word == "worlds")) {
      if (out.space) fail(number, start + 1, "space declared twice");
      try {
        out.space = parse_space_declaration(raw.substr(start));
      } catch (const Error& e) {
        fail(number, start + 1 + e.offset().value_or(0), e.what(), e.code());
      }
      space_ = out.space;
      section_ = Section::None;
      return;
    }
    static const std::map<std::string_view, Section> kSections{
        {"certain_true", Section::CertainTrue}, {"certain_false", Section::CertainFalse},
        {"order", Section::Order},              {"ranks", Section::Ranks},
        {"cond", Section::Cond}};
    // `a:1` under ranks: is an entry, not a header for section `a`.
    if (header && section_ == Section::Ranks && !kSections.count(word)) header = false;
    if (header) {
      auto it = kSections.find(word);
      if (it == kSections.end()) fail(number, start + 1, "unknown section '" + std::string(word) + "'");
      if (skip_space(raw, k + 1) != raw.size()) {
        fail(number, skip_space(raw, k + 1) + 1, "section header takes no inline entries");
      }
      if (!out.space) fail(number, start + 1, "declare 'atoms:' or 'worlds:' before other sections");
      if (!seen_.insert(it->second).second) fail(number, start + 1, "section '" + std::string(word) + "' repeated");
      section_ = it->second;
      return;
    }
    switch (section_) {
      case Section::None: fail(number, start + 1, "entry outside any section");
      case Section::CertainTrue: out.certain_true.push_back(sentence(line, start, raw.size())); break;
      case Section::CertainFalse: out.certain_false.push_back(sentence(line, start, raw.size())); break;
      case Section::Order: order_line(out, line, start); break;
      case Section::Ranks: rank_line(out, line, start); break;
      case Section::Cond: cond_line(out, line, start); break;
    }
  }

  Event sentence(const Line& line, std::size_t from, std::size_t to) const {
    auto text = line.text.substr(from, to - from);
    std::size_t lead = skip_space(text, 0);
    if (lead == text.size()) fail(line.number, from + 1, "missing sentence");
    try {
      return evaluate(*parse_sentence(text), space_);
    } catch (const Error& e) {
      fail(line.number, from + 1 + e.offset().value_or(lead), e.what(), e.code());
    }
  }

  // Finds a relation operator at depth 0 between `from` and `to`.
  struct RelHit {
    std::size_t pos, len;
    std::string_view symbol;
  };
  std::optional<RelHit> find_relation(const Line& line, std::size_t from, std::size_t to) const {
    std::optional<RelHit> hit;
    for (std::size_t i = from; i < to; ++i) {
      char c = line.text[i];
      if (c != '<' && c != '>' && c != '=') continue;
      std::size_t len = (i + 1 < to && line.text[i + 1] == '=' && c != '=') ? 2 : 1;
      if (hit) fail(line.number, i + 1, "more than one relation on a line");
      hit = RelHit{i, len, line.text.substr(i, len)};
      i += len - 1;
    }
    return hit;
  }

  void order_line(ProblemFile& out, const Line& line, std::size_t start) {
    auto hit = find_relation(line, start, line.text.size());
    if (!hit) fail(line.number, start + 1, "expected SENT REL SENT with REL one of < <= = >= >");
    auto lhs = sentence(line, start, hit->pos);
    auto rhs = sentence(line, hit->pos + hit->len, line.text.size());
    if (!out.partial) out.partial.emplace(space_);
    auto rel_sym = hit->symbol;
    if (rel_sym == "<") out.partial->add(rhs, Relation::GT, lhs);
    else if (rel_sym == "<=") out.partial->add(rhs, Relation::GE, lhs);
    else out.partial->add(lhs, *relation_from_symbol(rel_sym), rhs);
  }

  void rank_line(ProblemFile&, const Line& line, std::size_t start) {
    auto colon = line.text.rfind(':');
    if (colon == std::string_view::npos || colon < start) fail(line.number, start + 1, "expected SENT : INTEGER");
    auto e = sentence(line, start, colon);
    auto r = integer(line, colon + 1);
    auto [it, fresh] = ranks_.emplace(e.mask(), std::make_pair(r, line.number));
    if (!fresh && it->second.first != r) {
      fail(line.number, start + 1,
           format_event(e) + " already ranked " + std::to_string(it->second.first) + " on line " +
               std::to_string(it->second.second));
    }
  }

  std::uint64_t integer(const Line& line, std::size_t from) const {
    std::size_t p = skip_space(line.text, from);
    std::size_t q = p;
    while (q < line.text.size() && std::isdigit(static_cast<unsigned char>(line.text[q]))) ++q;
    if (q == p) fail(line.number, p + 1, "expected a non-negative integer");
    if (q != line.text.size()) fail(line.number, q + 1, "unexpected text after integer");
    if (q - p > 18) fail(line.number, p + 1, "integer too large");
    return std::stoull(std::string(line.text.substr(p, q - p)));
  }

  // `( SENT | SENT )` starting at `from`; returns the pair and the position
  // just past the closing parenthesis.
  std::pair<std::pair<Mask, Mask>, std::size_t> cond_term(const Line& line, std::size_t from) const {
    std::size_t p = skip_space(line.text, from);
    if (p >= line.text.size() || line.text[p] != '(') fail(line.number, p + 1, "expected '(' to open a conditional term");
    int depth = 0;
    std::optional<std::size_t> stroke;
    std::size_t close = std::string_view::npos;
    for (std::size_t i = p; i < line.text.size(); ++i) {
      char c = line.text[i];
      if (c == '(') ++depth;
      else if (c == ')') {
        if (--depth == 0) {
          close = i;
          break;
        }
      } else if (c == '|' && depth == 1 && !stroke) {
        stroke = i;
      }
    }
    if (close == std::string_view::npos) fail(line.number, p + 1, "unbalanced '('");
    if (!stroke) fail(line.number, p + 1, "conditional term needs a '|' between event and condition");
    auto a = sentence(line, p + 1, *stroke);
    auto c = sentence(line, *stroke + 1, close);
    return {{a.mask(), c.mask()}, close + 1};
  }

  void cond_line(ProblemFile&, const Line& line, std::size_t start) {
    auto [lhs, after] = cond_term(line, start);
    std::size_t p = skip_space(line.text, after);
    if (p < line.text.size() && line.text[p] == ':') {
      if (cond_mode_ == CondMode::Relations) fail(line.number, p + 1, "cond: mixes explicit ranks with relations");
      cond_mode_ = CondMode::Ranks;
      auto r = integer(line, p + 1);
      auto [it, fresh] = cond_ranks_.emplace(lhs, std::make_pair(r, line.number));
      if (!fresh && it->second.first != r) {
        fail(line.number, start + 1, "conditional pair already ranked on line " + std::to_string(it->second.second));
      }
      cond_lines_.emplace(lhs, std::make_pair(line.number, start + 1));
      return;
    }
    if (cond_mode_ == CondMode::Ranks) fail(line.number, p + 1, "cond: mixes explicit ranks with relations");
    cond_mode_ = CondMode::Relations;
    std::size_t q = p;
    while (q < line.text.size() && (line.text[q] == '<' || line.text[q] == '>' || line.text[q] == '=')) ++q;
    auto sym = line.text.substr(p, q - p);
    if (sym.empty() || !(sym == "<" || sym == "<=" || sym == "=" || sym == ">=" || sym == ">")) {
      fail(line.number, p + 1, "expected ':' or a relation after a conditional term");
    }
    auto [rhs, end] = cond_term(line, q);
    if (skip_space(line.text, end) != line.text.size()) fail(line.number, end + 1, "unexpected text after conditional term");
    if (sym == "<") cond_relations_.push_back({rhs, lhs, Relation::GT, line.number});
    else if (sym == "<=") cond_relations_.push_back({rhs, lhs, Relation::GE, line.number});
    else cond_relations_.push_back({lhs, rhs, *relation_from_symbol(sym), line.number});
    cond_lines_.emplace(lhs, std::make_pair(line.number, start + 1));
    cond_lines_.emplace(rhs, std::make_pair(line.number, start + 1));
  }

  void finish(ProblemFile& out) {
    if (!out.space) fail(1, 1, "missing 'atoms:' or 'worlds:' declaration");
    bool has_ranks = seen_.count(Section::Ranks) > 0;
    bool has_order = seen_.count(Section::Order) > 0;
    if (has_ranks && has_order) fail(1, 1, "a file has either 'ranks:' or 'order:', not both");
    if (!has_ranks && !has_order) fail(1, 1, "missing 'ranks:' or 'order:' section");
    if (has_order) {
      if (!out.partial) out.partial.emplace(out.space);
      // Certainty in a judgment set means equal to T (or F).
      const Event top(out.space, out.space->full_mask()), bottom(out.space, 0);
      for (std::size_t i = 0; i < out.certain_true.size(); ++i)
        out.partial->add(Judgment{out.certain_true[i], top, Relation::EQ, "t" + std::to_string(i + 1)});
      for (std::size_t i = 0; i < out.certain_false.size(); ++i)
        out.partial->add(Judgment{out.certain_false[i], bottom, Relation::EQ, "f" + std::to_string(i + 1)});
    }
    if (has_ranks) {
      std::vector<std::uint64_t> ranks(out.space->event_count());
      for (std::size_t m = 0; m < ranks.size(); ++m) {
        auto it = ranks_.find(static_cast<Mask>(m));
        if (it == ranks_.end()) {
          fail(1, 1, "ranks: no rank given for " + format_event(Event(out.space, static_cast<Mask>(m))));
        }
        ranks[m] = it->second.first;
      }
      out.complete.emplace(out.space, std::move(ranks));
    }
    if (seen_.count(Section::Cond)) build_conditional(out);
  }

  void build_conditional(ProblemFile& out) {
    if (!out.complete) fail(1, 1, "'cond:' needs a 'ranks:' section for its base ordering");
    ConditionalStructure cs(*out.complete);
    auto set = [&](std::pair<Mask, Mask> key, std::uint64_t r) {
      if (!cs.valid_conditioner(key.second)) {
        auto [ln, col] = cond_lines_.at(key);
        fail(ln, col, "cannot condition on " + format_event(Event(out.space, key.second)) + ", which is ranked with F");
      }
      cs.set(key.first, key.second, r);
    };
    if (cond_mode_ == CondMode::Ranks) {
      for (const auto& [key, v] : cond_ranks_) set(key, v.first);
    } else if (cond_mode_ == CondMode::Relations) {
      // Closure over the mentioned pairs; it must be consistent and total.
      std::map<std::pair<Mask, Mask>, std::size_t> index;
      std::vector<std::pair<Mask, Mask>> nodes;
      for (const auto& r : cond_relations_) {
        for (auto key : {r.lhs, r.rhs}) {
          if (index.emplace(key, nodes.size()).second) nodes.push_back(key);
        }
      }
      const std::size_t n = nodes.size();
      std::vector<int> st(n * n, 0);
      for (std::size_t i = 0; i < n; ++i) st[i * n + i] = 1;
      for (const auto& r : cond_relations_) {
        auto l = index[r.lhs], h = index[r.rhs];
        st[l * n + h] = std::max(st[l * n + h], r.rel == Relation::GT ? 2 : 1);
        if (r.rel == Relation::EQ) st[h * n + l] = std::max(st[h * n + l], 1);
      }
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            if (st[i * n + k] && st[k * n + j]) st[i * n + j] = std::max({st[i * n + j], st[i * n + k], st[k * n + j]});
      auto describe = [&](std::size_t i) {
        return "(" + format_event(Event(out.space, nodes[i].first)) + " | " +
               format_event(Event(out.space, nodes[i].second)) + ")";
      };
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (st[i * n + j] == 2 && st[j * n + i]) {
            auto [ln, col] = cond_lines_.at(nodes[i]);
            fail(ln, col, "cond: relations are contradictory between " + describe(i) + " and " + describe(j));
          }
          if (!st[i * n + j] && !st[j * n + i]) {
            auto [ln, col] = cond_lines_.at(nodes[j]);
            fail(ln, col, "cond: relations leave " + describe(i) + " and " + describe(j) + " unordered");
          }
        }
      }
      // A consistent total closure is a total preorder: sort and rank densely.
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return st[b * n + a] == 2; });
      std::vector<std::uint64_t> below(n, 0);
      for (std::size_t k = 1; k < n; ++k) {
        below[order[k]] = below[order[k - 1]] + (st[order[k] * n + order[k - 1]] == 2 ? 1 : 0);
      }
      for (std::size_t i = 0; i < n; ++i) set(nodes[i], below[i]);
    }
    out.conditional = std::move(cs);
  }

  enum class CondMode { Unset, Ranks, Relations };

  std::string_view text_;
  std::string name_;
  Section section_ = Section::None;
  std::set<Section> seen_;
  SpaceRef space_;
  std::map<Mask, std::pair<std::uint64_t, std::size_t>> ranks_;
  CondMode cond_mode_ = CondMode::Unset;
  std::map<std::pair<Mask, Mask>, std::pair<std::uint64_t, std::size_t>> cond_ranks_;
  std::vector<CondRelation> cond_relations_;
  std::map<std::pair<Mask, Mask>, std::pair<std::size_t, std::size_t>> cond_lines_;
};

}  // namespace detail

inline ProblemFile parse_problem(std::string_view text, std::string name = "<input>") {
  return detail::ProblemParser(text, std::move(name)).run();
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path);
}

}  // namespace qualprob
