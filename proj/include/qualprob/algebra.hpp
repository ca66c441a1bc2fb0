#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qualprob/errors.hpp"

namespace qualprob {

/// Bit i set <=> world i is a member.
using Mask = std::uint32_t;

/// Largest world count for which events over the space may be stored.
inline constexpr std::size_t kMaxWorlds = 24;

enum class SpaceMode { Atoms, Worlds };

/// A finite set of worlds, declared either by atomic sentences (2^n worlds,
/// world i makes atom j true iff bit j of i is set) or by naming the worlds
/// of a partition directly.
class Space {
 public:
  static std::shared_ptr<const Space> atoms(std::vector<std::string> names) {
    validate_names(names);
    if (names.empty()) {
      throw Error(ErrorCode::InvalidSpace, "atoms mode needs at least one atom");
    }
    if ((std::size_t{1} << std::min<std::size_t>(names.size(), 63)) > kMaxWorlds) {
      throw Error(ErrorCode::CapExceeded,
                  std::to_string(names.size()) + " atoms exceed the " +
                      std::to_string(kMaxWorlds) + "-world cap");
    }
    return std::shared_ptr<const Space>(new Space(SpaceMode::Atoms, std::move(names)));
  }

  static std::shared_ptr<const Space> worlds(std::vector<std::string> names) {
    validate_names(names);
    if (names.empty()) {
      throw Error(ErrorCode::InvalidSpace, "worlds mode needs at least one world");
    }
    if (names.size() > kMaxWorlds) {
      throw Error(ErrorCode::CapExceeded,
                  std::to_string(names.size()) + " worlds exceed the " +
                      std::to_string(kMaxWorlds) + "-world cap");
    }
    return std::shared_ptr<const Space>(new Space(SpaceMode::Worlds, std::move(names)));
  }

  /// Worlds named w1..wn.
  static std::shared_ptr<const Space> numbered_worlds(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= n; ++i) names.push_back("w" + std::to_string(i));
    return worlds(std::move(names));
  }

  SpaceMode mode() const noexcept { return mode_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t world_count() const noexcept { return world_count_; }
  std::size_t event_count() const noexcept { return std::size_t{1} << world_count_; }
  Mask full_mask() const noexcept {
    return world_count_ == 32 ? ~Mask{0} : ((Mask{1} << world_count_) - 1);
  }

  std::optional<std::size_t> index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
  }

  /// Worlds mode: the declared name. Atoms mode: the minterm, e.g. `x&~y`.
  std::string world_label(std::size_t world) const {
    if (mode_ == SpaceMode::Worlds) return names_.at(world);
    std::string out;
    for (std::size_t j = 0; j < names_.size(); ++j) {
      if (j) out += '&';
      if (!((world >> j) & 1U)) out += '~';
      out += names_[j];
    }
    return out;
  }

  /// The declaration as written in problem files, e.g. `worlds: w1 w2`.
  std::string declaration() const {
    std::string out = mode_ == SpaceMode::Atoms ? "atoms:" : "worlds:";
    for (const auto& n : names_) out += " " + n;
    return out;
  }

  static bool is_reserved(std::string_view word) {
    return word == "T" || word == "F" || word == "not" || word == "and" ||
           word == "or";
  }

  static bool is_identifier(std::string_view word) {
    if (word.empty()) return false;
    auto head = static_cast<unsigned char>(word[0]);
    if (!(std::isalpha(head) || head == '_')) return false;
    return std::all_of(word.begin() + 1, word.end(), [](char ch) {
      auto c = static_cast<unsigned char>(ch);
      return std::isalnum(c) || c == '_';
    });
  }

  friend bool operator==(const Space& a, const Space& b) {
    return a.mode_ == b.mode_ && a.names_ == b.names_;
  }

 private:
  Space(SpaceMode mode, std::vector<std::string> names)
      : mode_(mode),
        names_(std::move(names)),
        world_count_(mode_ == SpaceMode::Atoms ? (std::size_t{1} << names_.size())
                                               : names_.size()) {}

  static void validate_names(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto& n = names[i];
      if (!is_identifier(n)) {
        throw Error(ErrorCode::InvalidSpace, "'" + n + "' is not an identifier");
      }
      if (is_reserved(n)) {
        throw Error(ErrorCode::InvalidSpace, "'" + n + "' is a reserved word");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (names[j] == n) {
          throw Error(ErrorCode::InvalidSpace, "duplicate name '" + n + "'");
        }
      }
    }
  }

  SpaceMode mode_;
  std::vector<std::string> names_;
  std::size_t world_count_;
};

using SpaceRef = std::shared_ptr<const Space>;

inline bool same_space(const SpaceRef& a, const SpaceRef& b) {
  return a == b || (a && b && *a == *b);
}

inline void require_same_space(const SpaceRef& a, const SpaceRef& b) {
  if (!same_space(a, b)) {
    throw Error(ErrorCode::SpaceMismatch, "events belong to different spaces");
  }
}

/// A set of worlds: the denotation of a sentence.
class Event {
 public:
  Event(SpaceRef space, Mask members) : space_(std::move(space)), mask_(members) {
    if (!space_) throw Error(ErrorCode::InvalidSpace, "event without a space");
    if ((mask_ & ~space_->full_mask()) != 0) {
      throw Error(ErrorCode::InvalidSpace, "event mentions worlds outside its space");
    }
  }

  static Event top(SpaceRef space) {
    Mask m = space->full_mask();
    return Event(std::move(space), m);
  }
  static Event bottom(SpaceRef space) { return Event(std::move(space), 0); }
  static Event world(SpaceRef space, std::size_t w) {
    return Event(std::move(space), Mask{1} << w);
  }

  const SpaceRef& space() const noexcept { return space_; }
  Mask mask() const noexcept { return mask_; }
  bool contains(std::size_t world) const noexcept { return (mask_ >> world) & 1U; }
  bool is_top() const noexcept { return mask_ == space_->full_mask(); }
  bool is_bottom() const noexcept { return mask_ == 0; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(mask_)); }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < space_->world_count(); ++w) {
      if (contains(w)) out.push_back(w);
    }
    return out;
  }

  friend bool operator==(const Event& a, const Event& b) {
    return a.mask_ == b.mask_ && same_space(a.space_, b.space_);
  }

 private:
  SpaceRef space_;
  Mask mask_;
};

inline Event complement(const Event& a) {
  return Event(a.space(), a.space()->full_mask() & ~a.mask());
}
inline Event unite(const Event& a, const Event& b) {
  require_same_space(a.space(), b.space());
  return Event(a.space(), a.mask() | b.mask());
}
inline Event intersect(const Event& a, const Event& b) {
  require_same_space(a.space(), b.space());
  return Event(a.space(), a.mask() & b.mask());
}
inline Event difference(const Event& a, const Event& b) {
  require_same_space(a.space(), b.space());
  return Event(a.space(), a.mask() & ~b.mask());
}
/// a implies b iff every world of a is a world of b.
inline bool implies(const Event& a, const Event& b) {
  require_same_space(a.space(), b.space());
  return (a.mask() & ~b.mask()) == 0;
}

inline Event operator~(const Event& a) { return complement(a); }
inline Event operator|(const Event& a, const Event& b) { return unite(a, b); }
inline Event operator&(const Event& a, const Event& b) { return intersect(a, b); }

/// `T`, `F`, or the member worlds in braces, e.g. `{w1,w3}`.
inline std::string format_event(const Event& e) {
  if (e.is_top()) return "T";
  if (e.is_bottom()) return "F";
  std::string out = "{";
  bool first = true;
  for (auto w : e.members()) {
    if (!first) out += ',';
    first = false;
    out += e.space()->world_label(w);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Sentences

struct Sentence;
using SentencePtr = std::shared_ptr<const Sentence>;

/// Immutable sentence tree. Children are shared, so copies are cheap.
struct Sentence {
  enum class Kind { Atom, True, False, Not, And, Or };

  Kind kind;
  std::string name;  // Atom only
  SentencePtr left;  // Not, And, Or
  SentencePtr right; // And, Or

  static SentencePtr atom(std::string n) {
    return std::make_shared<const Sentence>(Sentence{Kind::Atom, std::move(n), nullptr, nullptr});
  }
  static SentencePtr truth() {
    return std::make_shared<const Sentence>(Sentence{Kind::True, {}, nullptr, nullptr});
  }
  static SentencePtr falsity() {
    return std::make_shared<const Sentence>(Sentence{Kind::False, {}, nullptr, nullptr});
  }
  static SentencePtr negation(SentencePtr child) {
    return std::make_shared<const Sentence>(Sentence{Kind::Not, {}, std::move(child), nullptr});
  }
  static SentencePtr conjunction(SentencePtr l, SentencePtr r) {
    return std::make_shared<const Sentence>(Sentence{Kind::And, {}, std::move(l), std::move(r)});
  }
  static SentencePtr disjunction(SentencePtr l, SentencePtr r) {
    return std::make_shared<const Sentence>(Sentence{Kind::Or, {}, std::move(l), std::move(r)});
  }
};

/// Structural equality of sentence trees.
inline bool same_tree(const Sentence& a, const Sentence& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Sentence::Kind::Atom: return a.name == b.name;
    case Sentence::Kind::True:
    case Sentence::Kind::False: return true;
    case Sentence::Kind::Not: return same_tree(*a.left, *b.left);
    case Sentence::Kind::And:
    case Sentence::Kind::Or:
      return same_tree(*a.left, *b.left) && same_tree(*a.right, *b.right);
  }
  return false;
}

namespace detail {

class SentenceParser {
 public:
  explicit SentenceParser(std::string_view text) : text_(text) {}

  SentencePtr parse() {
    advance();
    if (tok_.kind == Tok::End) fail(tok_.offset, "empty sentence");
    auto result = parse_or();
    if (tok_.kind != Tok::End) fail(tok_.offset, "unexpected '" + tok_.text + "'");
    return result;
  }

 private:
  enum class Tok { End, Ident, True, False, Not, And, Or, LParen, RParen };
  struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t offset = 0;
  };

  [[noreturn]] static void fail(std::size_t offset, const std::string& message) {
    throw Error(ErrorCode::SyntaxError, message, offset);
  }

  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    tok_ = Token{Tok::End, {}, pos_};
    if (pos_ >= text_.size()) return;
    char c = text_[pos_];
    auto single = [&](Tok k) {
      tok_ = Token{k, std::string(1, c), pos_};
      ++pos_;
    };
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '~': return single(Tok::Not);
      case '&':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '&') {
          fail(pos_, "'&&' is not an operator; use '&' or 'and'");
        }
        return single(Tok::And);
      case '|':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '|') {
          fail(pos_, "'||' is not an operator; use '|' or 'or'");
        }
        return single(Tok::Or);
      default: break;
    }
    auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size()) {
        auto d = static_cast<unsigned char>(text_[pos_]);
        if (!(std::isalnum(d) || d == '_')) break;
        ++pos_;
      }
      std::string word(text_.substr(start, pos_ - start));
      Tok k = Tok::Ident;
      if (word == "T") k = Tok::True;
      else if (word == "F") k = Tok::False;
      else if (word == "not") k = Tok::Not;
      else if (word == "and") k = Tok::And;
      else if (word == "or") k = Tok::Or;
      tok_ = Token{k, std::move(word), start};
      return;
    }
    fail(pos_, std::string("unexpected character '") + c + "'");
  }

  SentencePtr parse_or() {
    auto left = parse_and();
    while (tok_.kind == Tok::Or) {
      advance();
      left = Sentence::disjunction(std::move(left), parse_and());
    }
    return left;
  }

  SentencePtr parse_and() {
    auto left = parse_not();
    while (tok_.kind == Tok::And) {
      advance();
      left = Sentence::conjunction(std::move(left), parse_not());
    }
    return left;
  }

  SentencePtr parse_not() {
    if (tok_.kind == Tok::Not) {
      advance();
      return Sentence::negation(parse_not());
    }
    return parse_primary();
  }

  SentencePtr parse_primary() {
    Token t = tok_;
    switch (t.kind) {
      case Tok::Ident: advance(); return Sentence::atom(t.text);
      case Tok::True: advance(); return Sentence::truth();
      case Tok::False: advance(); return Sentence::falsity();
      case Tok::LParen: {
        advance();
        auto inner = parse_or();
        if (tok_.kind != Tok::RParen) fail(tok_.offset, "expected ')'");
        advance();
        return inner;
      }
      case Tok::End: fail(t.offset, "unexpected end of sentence");
      case Tok::And:
      case Tok::Or:
        fail(t.offset, "operator '" + t.text + "' is missing its left operand");
      case Tok::RParen: fail(t.offset, "unexpected ')'");
      case Tok::Not: break;
    }
    fail(t.offset, "unexpected '" + t.text + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token tok_;
};

inline int precedence(Sentence::Kind k) {
  switch (k) {
    case Sentence::Kind::Or: return 1;
    case Sentence::Kind::And: return 2;
    case Sentence::Kind::Not: return 3;
    default: return 4;
  }
}

inline void render_into(const Sentence& s, int context, bool right_operand, std::string& out) {
  int p = precedence(s.kind);
  // Binary operators are left-associative, so an equal-precedence right
  // operand needs parentheses too.
  bool parens = p < context || (right_operand && p == context && p < 3);
  if (parens) out += '(';
  switch (s.kind) {
    case Sentence::Kind::Atom: out += s.name; break;
    case Sentence::Kind::True: out += 'T'; break;
    case Sentence::Kind::False: out += 'F'; break;
    case Sentence::Kind::Not:
      out += '~';
      render_into(*s.left, 3, false, out);
      break;
    case Sentence::Kind::And:
    case Sentence::Kind::Or:
      render_into(*s.left, p, false, out);
      out += s.kind == Sentence::Kind::And ? " & " : " | ";
      render_into(*s.right, p, true, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace detail

/// Parses a sentence. Precedence is `not` > `and` > `or`; binary operators
/// associate to the left. Tokens: `T`, `F`, identifiers, `~`/`not`,
/// `&`/`and`, `|`/`or`, parentheses.
inline SentencePtr parse_sentence(std::string_view text) {
  return detail::SentenceParser(text).parse();
}

/// Renders with the minimum parentheses needed to parse back to the same tree.
inline std::string render(const Sentence& s) {
  std::string out;
  detail::render_into(s, 0, false, out);
  return out;
}

inline Event evaluate(const Sentence& s, const SpaceRef& space) {
  switch (s.kind) {
    case Sentence::Kind::True: return Event::top(space);
    case Sentence::Kind::False: return Event::bottom(space);
    case Sentence::Kind::Atom: {
      auto idx = space->index_of(s.name);
      if (!idx) throw Error(ErrorCode::UnknownAtom, "unknown atom '" + s.name + "'");
      if (space->mode() == SpaceMode::Worlds) return Event::world(space, *idx);
      Mask m = 0;
      for (std::size_t w = 0; w < space->world_count(); ++w) {
        if ((w >> *idx) & 1U) m |= Mask{1} << w;
      }
      return Event(space, m);
    }
    case Sentence::Kind::Not: return complement(evaluate(*s.left, space));
    case Sentence::Kind::And:
      return intersect(evaluate(*s.left, space), evaluate(*s.right, space));
    case Sentence::Kind::Or:
      return unite(evaluate(*s.left, space), evaluate(*s.right, space));
  }
  throw Error(ErrorCode::SyntaxError, "malformed sentence tree");
}

/// Parse and evaluate in one step.
inline Event event_of(std::string_view text, const SpaceRef& space) {
  return evaluate(*parse_sentence(text), space);
}

/// A sentence denoting `e`, parseable in e's space: `T`, `F`, a disjunction
/// of world names, or (atoms mode) a disjunction of minterms.
inline std::string sentence_for(const Event& e) {
  if (e.is_top()) return "T";
  if (e.is_bottom()) return "F";
  std::string out;
  bool atoms = e.space()->mode() == SpaceMode::Atoms && e.space()->names().size() > 1;
  for (auto w : e.members()) {
    if (!out.empty()) out += " | ";
    if (atoms) out += '(';
    out += e.space()->world_label(w);
    if (atoms) out += ')';
  }
  return out;
}

}  // namespace qualprob
