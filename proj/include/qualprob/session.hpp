#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "qualprob/credal.hpp"
#include "qualprob/problem_file.hpp"
#include "qualprob/report.hpp"

namespace qualprob {

struct SessionConfig {
  /// Where journals live. Empty keeps sessions in memory only.
  std::filesystem::path journal_dir;
  std::size_t max_worlds = 10;
  /// Wall-clock budget per query; zero disables it.
  std::chrono::milliseconds query_budget{5000};
  /// Simplex pivot budget per solve; zero disables it. Deterministic, unlike
  /// the wall clock.
  std::size_t query_pivots = 0;
  /// Milliseconds since the epoch, stamped on journal records.
  std::function<std::int64_t()> clock = [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
  /// Seeds session id generation; unset draws from std::random_device.
  std::optional<std::uint64_t> id_seed;
};

/// One asserted comparison as typed, plus its denotation.
struct SessionJudgment {
  Judgment judgment;
  std::string lhs_text;
  std::string rhs_text;
};

namespace detail {

inline std::string one_line(std::string_view text) {
  std::string s(text);
  for (auto& c : s) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  return s;
}

inline Event field_event(std::string_view field, std::string_view text, const SpaceRef& space) {
  try {
    return event_of(text, space);
  } catch (const Error& e) {
    throw Error(e.code(), std::string(field) + ": " + e.what(), e.offset());
  }
}

// Splits `lhs REL rhs` where REL is one of > >= =.
inline std::tuple<std::string, Relation, std::string> split_judgment(std::string_view text) {
  auto pos = text.find_first_of("<>=");
  if (pos == std::string_view::npos) throw Error(ErrorCode::SyntaxError, "missing relation", text.size());
  std::size_t len = text.substr(pos, 2) == ">=" ? 2 : 1;
  auto rel = relation_from_symbol(text.substr(pos, len));
  if (!rel) throw Error(ErrorCode::SyntaxError, "relation must be one of > >= =", pos);
  return {std::string(text.substr(0, pos)), *rel, std::string(text.substr(pos + len))};
}

}  // namespace detail

/// An elicitation session: an append-only journal and the state it derives.
/// Every answer is a function of the journal prefix it was computed at.
class Session {
 public:
  Session(std::string id, SpaceRef space) : id_(std::move(id)), space_(std::move(space)) {
    journal_.push_back("space " + space_->declaration());
  }

  const std::string& id() const noexcept { return id_; }
  const SpaceRef& space() const noexcept { return space_; }
  std::size_t revision() const noexcept { return journal_.size() - 1; }
  const std::vector<std::string>& journal() const noexcept { return journal_; }
  const std::vector<SessionJudgment>& active() const noexcept { return active_; }
  std::mutex& mutex() const noexcept { return mutex_; }

  PartialOrdering judgments() const {
    PartialOrdering po(space_);
    for (const auto& j : active_) po.add(j.judgment);
    return po;
  }

  /// Applies an assertion; returns the new judgment id.
  std::string apply_assert(std::string_view lhs, Relation rel, std::string_view rhs, std::int64_t stamp) {
    auto l = detail::one_line(lhs), r = detail::one_line(rhs);
    auto le = detail::field_event("lhs", l, space_);
    auto re = detail::field_event("rhs", r, space_);
    std::string jid = "j" + std::to_string(++asserted_);
    active_.push_back({Judgment{le, re, rel, jid}, l, r});
    journal_.push_back("assert " + jid + " " + std::to_string(stamp) + " " + l + " " +
                       std::string(relation_symbol(rel)) + " " + r);
    cache_.clear();
    return jid;
  }

  void apply_retract(std::string_view jid, std::int64_t stamp) {
    auto it = std::find_if(active_.begin(), active_.end(),
                           [&](const SessionJudgment& j) { return j.judgment.id == jid; });
    if (it == active_.end()) {
      throw Error(ErrorCode::UnknownJudgment, "no active judgment '" + std::string(jid) + "'");
    }
    active_.erase(it);
    journal_.push_back("retract " + std::string(jid) + " " + std::to_string(stamp));
    cache_.clear();
  }

  /// Rebuilds a session from journal text, checking every record.
  static std::unique_ptr<Session> replay(std::string id, std::istream& in, std::size_t max_worlds) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("space ", 0) != 0) {
      throw Error(ErrorCode::Io, "journal must start with a space record");
    }
    auto s = std::make_unique<Session>(std::move(id), parse_space_declaration(std::string_view(line).substr(6)));
    if (s->space_->world_count() > max_worlds) {
      throw Error(ErrorCode::CapExceeded, "journal space exceeds the world cap");
    }
    std::size_t number = 1;
    while (std::getline(in, line)) {
      ++number;
      if (line.empty()) continue;
      std::istringstream fields(line);
      std::string kind, jid;
      std::int64_t stamp = 0;
      fields >> kind >> jid >> stamp;
      if (!fields) throw Error(ErrorCode::Io, "journal line " + std::to_string(number) + " is malformed");
      if (kind == "assert") {
        std::string rest;
        std::getline(fields, rest);
        auto [l, rel, r] = detail::split_judgment(rest);
        auto trim = [](std::string t) {
          auto a = t.find_first_not_of(' ');
          auto b = t.find_last_not_of(' ');
          return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
        };
        auto got = s->apply_assert(trim(l), rel, trim(r), stamp);
        if (got != jid) throw Error(ErrorCode::Io, "journal line " + std::to_string(number) + " has id out of sequence");
      } else if (kind == "retract") {
        s->apply_retract(jid, stamp);
      } else {
        throw Error(ErrorCode::Io, "journal line " + std::to_string(number) + " has unknown record '" + kind + "'");
      }
    }
    return s;
  }

  std::optional<Json> cached(const std::string& key) const {
    auto it = cache_.find(key);
    if (it == cache_.end()) return std::nullopt;
    return it->second;
  }
  void remember(const std::string& key, const Json& value) { cache_[key] = value; }

 private:
  std::string id_;
  SpaceRef space_;
  std::vector<std::string> journal_;
  std::vector<SessionJudgment> active_;
  std::size_t asserted_ = 0;
  std::map<std::string, Json> cache_;
  mutable std::mutex mutex_;
};

/// Many independent sessions. Mutations to one session are serialized by its
/// lock; sessions share nothing else.
class SessionService {
 public:
  explicit SessionService(SessionConfig config = {})
      : config_(std::move(config)), ids_(config_.id_seed ? *config_.id_seed : std::random_device{}()) {
    if (!config_.journal_dir.empty()) std::filesystem::create_directories(config_.journal_dir);
  }

  const SessionConfig& config() const noexcept { return config_; }

  /// Replays every journal in the journal directory. Returns how many loaded.
  std::size_t load_journals() {
    if (config_.journal_dir.empty()) return 0;
    std::size_t loaded = 0;
    for (const auto& entry : std::filesystem::directory_iterator(config_.journal_dir)) {
      if (entry.path().extension() != ".journal") continue;
      std::ifstream in(entry.path());
      auto id = entry.path().stem().string();
      std::shared_ptr<Session> s = Session::replay(id, in, config_.max_worlds);
      std::unique_lock lock(sessions_mutex_);
      sessions_[id] = std::move(s);
      ++loaded;
    }
    return loaded;
  }

  Json create(std::string_view declaration) {
    SpaceRef space;
    try {
      space = parse_space_declaration(declaration);
    } catch (const Error& e) {
      throw Error(e.code(), std::string("space: ") + e.what(), e.offset());
    }
    if (space->world_count() > config_.max_worlds) {
      throw Error(ErrorCode::CapExceeded, "space has " + std::to_string(space->world_count()) +
                                              " worlds; sessions allow at most " +
                                              std::to_string(config_.max_worlds));
    }
    std::shared_ptr<Session> s;
    {
      std::unique_lock lock(sessions_mutex_);
      std::string id;
      do {
        id = fresh_id();
      } while (sessions_.count(id));
      s = std::make_shared<Session>(id, space);
      sessions_[id] = s;
    }
    std::lock_guard guard(s->mutex());
    persist(*s, true);
    return status_locked(*s);
  }

  Json assert_judgment(const std::string& id, std::string_view lhs, std::string_view rel, std::string_view rhs) {
    auto relation = relation_from_symbol(rel);
    if (!relation) throw Error(ErrorCode::SyntaxError, "rel must be one of \">\", \">=\", \"=\"");
    auto s = find(id);
    std::lock_guard guard(s->mutex());
    auto jid = s->apply_assert(lhs, *relation, rhs, config_.clock());
    persist(*s, false);
    Json out = status_locked(*s);
    out["changed"] = jid;
    return out;
  }

  Json retract(const std::string& id, const std::string& jid) {
    auto s = find(id);
    std::lock_guard guard(s->mutex());
    s->apply_retract(jid, config_.clock());
    persist(*s, false);
    Json out = status_locked(*s);
    out["changed"] = jid;
    return out;
  }

  Json status(const std::string& id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex());
    return status_locked(*s);
  }

  Json report(const std::string& id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex());
    return memo(*s, "report", [&] {
      return Json{{"revision", s->revision()}, {"report", report::axioms(check_partial(s->judgments()))}};
    });
  }

  Json realization(const std::string& id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex());
    return memo(*s, "realization", [&] {
      return Json{{"revision", s->revision()},
                  {"realization", report::realization(realize_partial(s->judgments(), solve_options()))}};
    });
  }

  Json entails(const std::string& id, std::string_view lhs, std::string_view rhs) {
    auto s = find(id);
    std::lock_guard guard(s->mutex());
    auto a = detail::field_event("lhs", lhs, s->space());
    auto b = detail::field_event("rhs", rhs, s->space());
    return memo(*s, "entails " + std::to_string(a.mask()) + " " + std::to_string(b.mask()), [&] {
      auto cs = consistent_set(*s);
      return Json{{"revision", s->revision()},
                  {"lhs", report::event(a)},
                  {"rhs", report::event(b)},
                  {"entailment", report::entailment(qualprob::entails(cs, a, b, credal_options()))}};
    });
  }

  Json bounds(const std::string& id, std::string_view event, std::optional<std::string_view> given) {
    auto s = find(id);
    std::lock_guard guard(s->mutex());
    auto a = detail::field_event("event", event, s->space());
    std::optional<Event> c;
    if (given) c = detail::field_event("given", *given, s->space());
    std::string key = "bounds " + std::to_string(a.mask()) + (c ? " " + std::to_string(c->mask()) : "");
    return memo(*s, key, [&] {
      auto cs = consistent_set(*s);
      Json out{{"revision", s->revision()}, {"event", report::event(a)}};
      if (c) {
        out["given"] = report::event(*c);
        out["bounds"] = report::bounds(cond_bounds(cs, a, *c, credal_options()));
      } else {
        out["bounds"] = report::bounds(qualprob::bounds(cs, a, credal_options()));
      }
      return out;
    });
  }

  /// The journal as stored, one record per line.
  std::string journal(const std::string& id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex());
    std::string out;
    for (const auto& line : s->journal()) out += line + "\n";
    return out;
  }

 private:
  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
    return it->second;
  }

  std::string fresh_id() {
    std::ostringstream os;
    os << std::hex;
    for (int k = 0; k < 2; ++k) {
      auto v = ids_();
      for (int b = 60; b >= 0; b -= 4) os << ((v >> b) & 0xF);
    }
    return os.str();
  }

  void persist(const Session& s, bool whole) {
    if (config_.journal_dir.empty()) return;
    auto path = config_.journal_dir / (s.id() + ".journal");
    std::ofstream out(path, whole ? std::ios::trunc : std::ios::app);
    if (!out) throw Error(ErrorCode::Io, "cannot write journal " + path.string());
    if (whole) {
      for (const auto& line : s.journal()) out << line << '\n';
    } else {
      out << s.journal().back() << '\n';
    }
    out.flush();
  }

  SolveOptions solve_options() const {
    SolveOptions o;
    o.max_pivots = config_.query_pivots;
    if (config_.query_budget.count() > 0) o.deadline = std::chrono::steady_clock::now() + config_.query_budget;
    return o;
  }

  CredalOptions credal_options() const {
    CredalOptions o;
    o.solve = solve_options();
    return o;
  }

  template <typename Fn>
  Json memo(Session& s, const std::string& key, Fn&& compute) {
    if (auto hit = s.cached(key)) return *hit;
    Json value = compute();
    s.remember(key, value);
    return value;
  }

  CredalSet consistent_set(const Session& s) const {
    CredalSet cs(s.judgments());
    if (is_empty(cs, credal_options())) {
      throw Error(ErrorCode::InconsistentSession, "the session's judgments admit no distribution");
    }
    return cs;
  }

  // Deletion filtering: start from the certificate's support and drop any
  // judgment whose removal keeps the rest infeasible.
  std::vector<std::string> conflict_set(const Session& s, const NonRealizable& nr) const {
    std::vector<Judgment> keep;
    for (const auto& c : nr.certificate) keep.push_back(c.judgment);
    for (std::size_t i = 0; i < keep.size();) {
      std::vector<Judgment> trial = keep;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
      PartialOrdering po(s.space());
      for (const auto& j : trial) po.add(j);
      if (std::holds_alternative<NonRealizable>(realize_partial(po, solve_options()))) {
        keep = std::move(trial);
      } else {
        ++i;
      }
    }
    std::vector<std::string> ids;
    for (const auto& j : keep) ids.push_back(j.id);
    return ids;
  }

  static std::optional<std::string> a3_warning(const Judgment& j) {
    const bool lt = j.lhs.is_top(), lf = j.lhs.is_bottom(), rt = j.rhs.is_top(), rf = j.rhs.is_bottom();
    if (j.rel == Relation::GT && (lf || rt)) return "nothing ranks strictly below F or strictly above T";
    if ((rt && !lt) || (j.rel == Relation::EQ && lt && !rt)) {
      return "places a non-tautology with T; A3 requires it be asserted certainly true";
    }
    if ((lf && !rf) || (j.rel == Relation::EQ && rf && !lf)) {
      return "places a satisfiable event with F; A3 requires it be asserted certainly false";
    }
    return std::nullopt;
  }

  // A mutation is committed before its status is computed, so a status that
  // runs out of budget reports `consistent: null` instead of failing the
  // request. Such a status is not cached.
  Json status_locked(Session& s) {
    if (auto hit = s.cached("status")) return *hit;
    Json judgments = Json::array();
    Json warnings = Json::array();
    for (const auto& j : s.active()) {
      Json row = report::judgment(j.judgment);
      row["lhs_text"] = j.lhs_text;
      row["rhs_text"] = j.rhs_text;
      judgments.push_back(std::move(row));
      if (auto w = a3_warning(j.judgment)) warnings.push_back(Json{{"judgment", j.judgment.id}, {"message", *w}});
    }
    Json out{{"id", s.id()}, {"space", s.space()->declaration()}, {"revision", s.revision()}, {"judgments", judgments}};
    try {
      auto outcome = realize_partial(s.judgments(), solve_options());
      if (const auto* r = std::get_if<Realization>(&outcome)) {
        out["consistent"] = true;
        out["margin"] = report::rational(r->margin);
      } else {
        out["consistent"] = false;
        out["conflict"] = conflict_set(s, std::get<NonRealizable>(outcome));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BudgetExceeded) throw;
      out["consistent"] = nullptr;
      out["budget_exceeded"] = true;
      out["warnings"] = warnings;
      return out;
    }
    out["warnings"] = warnings;
    s.remember("status", out);
    return out;
  }

  SessionConfig config_;
  std::mt19937_64 ids_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace qualprob
