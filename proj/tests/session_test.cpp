#include "qualprob/session.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "qualprob/server.hpp"
#include "support.hpp"

namespace qp = qualprob;
namespace fs = std::filesystem;
using qp::ErrorCode;
using qp::Json;
using testing_support::Gen;

namespace {

qp::SessionConfig memory_config() {
  qp::SessionConfig c;
  c.clock = [] { return std::int64_t{1000}; };
  c.id_seed = 7;
  return c;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) : path_(fs::temp_directory_path() / ("qualprob_" + tag)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string id_of(const Json& j) { return j["id"].get<std::string>(); }

}  // namespace

TEST(Session, CreateGivesConsistentEmptySessions) {
  qp::SessionService svc(memory_config());
  auto a = svc.create("worlds: w1 w2 w3");
  EXPECT_TRUE(a["consistent"].get<bool>());
  EXPECT_EQ(a["revision"], 0);
  EXPECT_TRUE(a["judgments"].empty());
  auto b = svc.create("atoms: x y");
  EXPECT_NE(id_of(a), id_of(b));
  EXPECT_EQ(id_of(a).size(), 32U);
  EXPECT_EQ(svc.realization(id_of(b))["realization"]["distribution"].size(), 4U);
}

TEST(Session, CreateRejectsBadSpaces) {
  qp::SessionService svc(memory_config());
  EXPECT_QP_ERROR(svc.create("worlds: w1 T"), ErrorCode::InvalidSpace);
  EXPECT_QP_ERROR(svc.create("w1 w2"), ErrorCode::InvalidSpace);
  EXPECT_QP_ERROR(svc.create("atoms: a b c d"), ErrorCode::CapExceeded);  // 16 worlds > 10
}

TEST(Session, AssertThenContradictThenRetract) {
  qp::SessionService svc(memory_config());
  auto id = id_of(svc.create("worlds: w1 w2"));
  auto first = svc.assert_judgment(id, "w1", ">", "w2");
  EXPECT_EQ(first["changed"], "j1");
  EXPECT_TRUE(first["consistent"].get<bool>());
  EXPECT_EQ(first["margin"], "1");
  EXPECT_EQ(first["revision"], 1);

  auto second = svc.assert_judgment(id, "w2", ">", "w1");
  EXPECT_FALSE(second["consistent"].get<bool>());
  EXPECT_EQ(second["conflict"], (Json{"j1", "j2"}));
  EXPECT_QP_ERROR(svc.bounds(id, "w1", std::nullopt), ErrorCode::InconsistentSession);
  EXPECT_QP_ERROR(svc.entails(id, "w1", "w2"), ErrorCode::InconsistentSession);

  auto back = svc.retract(id, "j2");
  EXPECT_TRUE(back["consistent"].get<bool>());
  EXPECT_EQ(back["revision"], 3);
  EXPECT_QP_ERROR(svc.retract(id, "j2"), ErrorCode::UnknownJudgment);
  EXPECT_QP_ERROR(svc.retract(id, "j9"), ErrorCode::UnknownJudgment);
}

TEST(Session, ReflexiveEqualityIsHarmless) {
  qp::SessionService svc(memory_config());
  auto id = id_of(svc.create("atoms: a b"));
  auto before = svc.bounds(id, "a", std::nullopt)["bounds"];
  auto s = svc.assert_judgment(id, "a", "=", "a");
  EXPECT_TRUE(s["consistent"].get<bool>());
  EXPECT_EQ(svc.bounds(id, "a", std::nullopt)["bounds"], before);
}

TEST(Session, ConflictSetIsMinimalAndInconsistentAlone) {
  qp::SessionService svc(memory_config());
  auto id = id_of(svc.create("worlds: a b c d"));
  svc.assert_judgment(id, "d", ">=", "a");  // j1, not involved
  svc.assert_judgment(id, "a", ">", "b");   // j2
  svc.assert_judgment(id, "b", ">", "c");   // j3
  svc.assert_judgment(id, "a or d", ">=", "b");  // j4, not involved
  auto s = svc.assert_judgment(id, "c", ">=", "a");  // j5
  ASSERT_FALSE(s["consistent"].get<bool>());
  EXPECT_EQ(s["conflict"], (Json{"j2", "j3", "j5"}));
}

TEST(Session, ParseErrorsNameTheField) {
  qp::SessionService svc(memory_config());
  auto id = id_of(svc.create("worlds: w1 w2"));
  try {
    svc.assert_judgment(id, "w1", ">", "w2 and");
    FAIL();
  } catch (const qp::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
    EXPECT_EQ(std::string(e.what()).rfind("rhs: ", 0), 0U);
    EXPECT_EQ(e.offset(), 6U);
  }
  EXPECT_QP_ERROR(svc.assert_judgment(id, "w1", "<", "w2"), ErrorCode::SyntaxError);
  EXPECT_QP_ERROR(svc.assert_judgment(id, "w3", ">", "w2"), ErrorCode::UnknownAtom);
  EXPECT_QP_ERROR(svc.status("nope"), ErrorCode::UnknownSession);
  // Failed assertions leave no trace.
  EXPECT_EQ(svc.status(id)["revision"], 0);
}

TEST(Session, A3WarningsAreRecordedNotRejected) {
  qp::SessionService svc(memory_config());
  auto id = id_of(svc.create("worlds: w1 w2"));
  auto s = svc.assert_judgment(id, "w1", "=", "T");
  EXPECT_TRUE(s["consistent"].get<bool>());
  ASSERT_EQ(s["warnings"].size(), 1U);
  EXPECT_EQ(s["warnings"][0]["judgment"], "j1");
  s = svc.assert_judgment(id, "F", ">", "w2");
  EXPECT_EQ(s["warnings"].size(), 2U);
  EXPECT_FALSE(s["consistent"].get<bool>());
  s = svc.assert_judgment(id, "w1", ">=", "w1 and w2");
  EXPECT_EQ(s["warnings"].size(), 2U);
}

TEST(Session, ChainBoundsAndEntailment) {
  qp::SessionService svc(memory_config());
  auto id = id_of(svc.create("worlds: w1 w2 w3"));
  svc.assert_judgment(id, "w1", ">=", "w2");
  auto e = svc.entails(id, "w1 or w3", "w2 or w3");
  EXPECT_TRUE(e["entailment"]["always"].get<bool>());
  svc.assert_judgment(id, "w2", ">=", "w3");
  auto b = svc.bounds(id, "w1", std::nullopt);
  EXPECT_EQ(b["bounds"]["lower"], "1/3");
  EXPECT_EQ(b["bounds"]["upper"], "1");
  EXPECT_EQ(b["revision"], 2);
  auto c = svc.bounds(id, "w1", "w1 or w2");
  EXPECT_EQ(c["given"], "{w1,w2}");
  EXPECT_EQ(c["bounds"]["lower"], "1/2");
  EXPECT_QP_ERROR(svc.bounds(id, "w1", "F"), ErrorCode::ZeroProbabilityConditioner);
  auto report = svc.report(id);
  EXPECT_TRUE(report["report"]["all_pass"].get<bool>());
}

TEST(Session, RealizationHonorsEveryJudgment) {
  qp::SessionService svc(memory_config());
  auto id = id_of(svc.create("atoms: x y"));
  svc.assert_judgment(id, "x", ">", "y");
  svc.assert_judgment(id, "x and y", "=", "~x and ~y");
  svc.assert_judgment(id, "y", ">=", "x and ~y");
  auto r = svc.realization(id);
  ASSERT_TRUE(r["realization"]["realizable"].get<bool>());
  // Recompute the judgments from the reported masses.
  auto space = qp::parse_space_declaration("atoms: x y");
  std::vector<qp::Rational> mass;
  for (std::size_t w = 0; w < 4; ++w) {
    mass.push_back(qp::Rational::parse(r["realization"]["distribution"][space->world_label(w)].get<std::string>()));
  }
  qp::Distribution p(space, mass);
  auto pr = [&](const char* s) { return p.probability(qp::event_of(s, space)); };
  EXPECT_GT(pr("x"), pr("y"));
  EXPECT_EQ(pr("x and y"), pr("~x and ~y"));
  EXPECT_GE(pr("y"), pr("x and ~y"));
}

TEST(Session, RetractNeverNarrowsBounds) {
  Gen g(5);
  const char* rels[] = {">", ">=", "="};
  for (int trial = 0; trial < 30; ++trial) {
    qp::SessionService svc(memory_config());
    auto id = id_of(svc.create("worlds: a b c"));
    const char* names[] = {"a", "b", "c", "a or b", "b or c", "a or c"};
    for (int k = 0; k < 3; ++k) svc.assert_judgment(id, names[g.below(6)], rels[g.below(3)], names[g.below(6)]);
    if (!svc.status(id)["consistent"].get<bool>()) continue;
    std::vector<Json> before;
    for (auto n : names) before.push_back(svc.bounds(id, n, std::nullopt)["bounds"]);
    svc.retract(id, "j" + std::to_string(1 + g.below(3)));
    for (std::size_t i = 0; i < 6; ++i) {
      auto now = svc.bounds(id, names[i], std::nullopt)["bounds"];
      EXPECT_LE(qp::Rational::parse(now["lower"].get<std::string>()),
                qp::Rational::parse(before[i]["lower"].get<std::string>()));
      EXPECT_GE(qp::Rational::parse(now["upper"].get<std::string>()),
                qp::Rational::parse(before[i]["upper"].get<std::string>()));
    }
  }
}

TEST(Session, ResponsesAreCachedPerRevision) {
  qp::SessionService svc(memory_config());
  auto id = id_of(svc.create("worlds: a b"));
  auto r0 = svc.realization(id);
  EXPECT_EQ(svc.realization(id), r0);
  svc.assert_judgment(id, "a", ">", "b");
  auto r1 = svc.realization(id);
  EXPECT_EQ(r1["revision"], 1);
  EXPECT_NE(r1, r0);
}

TEST(Session, PivotBudgetIsEnforcedPerQuery) {
  auto cfg = memory_config();
  cfg.query_pivots = 1;
  qp::SessionService svc(cfg);
  auto id = id_of(svc.create("worlds: a b c"));
  // The mutation commits; only its status computation is cut short.
  auto s = svc.assert_judgment(id, "a", ">", "b or c");
  EXPECT_TRUE(s["consistent"].is_null());
  EXPECT_TRUE(s["budget_exceeded"].get<bool>());
  EXPECT_EQ(s["revision"], 1);
  EXPECT_QP_ERROR(svc.realization(id), ErrorCode::BudgetExceeded);
  EXPECT_QP_ERROR(svc.bounds(id, "a", std::nullopt), ErrorCode::BudgetExceeded);
}

TEST(Session, ZeroBudgetsMeanUnlimited) {
  auto cfg = memory_config();
  cfg.query_budget = std::chrono::milliseconds(0);
  cfg.query_pivots = 0;
  qp::SessionService svc(cfg);
  auto id = id_of(svc.create("worlds: a b c"));
  auto s = svc.assert_judgment(id, "a", ">", "b or c");
  EXPECT_TRUE(s["consistent"].get<bool>());
  EXPECT_NO_THROW(svc.bounds(id, "a", std::nullopt));
}

TEST(SessionJournal, PersistsAndReloads) {
  TempDir dir("journal_reload");
  auto cfg = memory_config();
  cfg.journal_dir = dir.path();
  std::string id;
  Json status;
  {
    qp::SessionService svc(cfg);
    id = id_of(svc.create("worlds: w1 w2 w3"));
    svc.assert_judgment(id, "w1", ">=", "w2");
    svc.assert_judgment(id, "w2", ">=", "w3");
    svc.assert_judgment(id, "w3", ">", "w1");
    svc.retract(id, "j3");
    status = svc.status(id);
  }
  auto text = [&] {
    std::ifstream in(dir.path() / (id + ".journal"));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }();
  EXPECT_EQ(text,
            "space worlds: w1 w2 w3\n"
            "assert j1 1000 w1 >= w2\n"
            "assert j2 1000 w2 >= w3\n"
            "assert j3 1000 w3 > w1\n"
            "retract j3 1000\n");
  qp::SessionService again(cfg);
  EXPECT_EQ(again.load_journals(), 1U);
  EXPECT_EQ(again.status(id), status);
  EXPECT_EQ(again.bounds(id, "w1", std::nullopt)["bounds"]["lower"], "1/3");
  EXPECT_EQ(again.assert_judgment(id, "w1", ">", "w2")["changed"], "j4");
}

TEST(SessionJournal, MalformedJournalsAreRejected) {
  auto replay = [](const std::string& text) {
    std::istringstream in(text);
    return qp::Session::replay("x", in, 10);
  };
  EXPECT_QP_ERROR(replay(""), ErrorCode::Io);
  EXPECT_QP_ERROR(replay("assert j1 0 a > b\n"), ErrorCode::Io);
  EXPECT_QP_ERROR(replay("space worlds: a b\nassert j2 0 a > b\n"), ErrorCode::Io);
  EXPECT_QP_ERROR(replay("space worlds: a b\nretract j1 0\n"), ErrorCode::UnknownJudgment);
  EXPECT_QP_ERROR(replay("space worlds: a b\nfrobnicate j1 0\n"), ErrorCode::Io);
  EXPECT_QP_ERROR(replay("space worlds: a b\nassert j1 0 a > c\n"), ErrorCode::UnknownAtom);
  EXPECT_QP_ERROR(replay("space atoms: a b c d\n"), ErrorCode::CapExceeded);
  EXPECT_EQ(replay("space worlds: a b\nassert j1 5 a >= b\n\n")->revision(), 1U);
}

TEST(SessionJournal, ReplayReproducesAnswers) {
  Gen g(99);
  const char* rels[] = {">", ">=", "="};
  const char* sentences[] = {"a", "b", "c", "a or b", "~a", "b and c", "T", "F"};
  for (int trial = 0; trial < 40; ++trial) {
    qp::SessionService svc(memory_config());
    auto id = id_of(svc.create("worlds: a b c"));
    std::vector<std::string> live;
    int next = 1;
    for (int step = 0; step < 8; ++step) {
      if (!live.empty() && g.below(4) == 0) {
        auto k = g.below(live.size());
        svc.retract(id, live[k]);
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        svc.assert_judgment(id, sentences[g.below(8)], rels[g.below(3)], sentences[g.below(8)]);
        live.push_back("j" + std::to_string(next++));
      }
    }
    std::istringstream in(svc.journal(id));
    auto copy = qp::Session::replay(id, in, 10);
    EXPECT_EQ(copy->journal(), [&] {
      std::vector<std::string> lines;
      std::istringstream again(svc.journal(id));
      for (std::string l; std::getline(again, l);) lines.push_back(l);
      return lines;
    }());
    std::vector<std::string> ids;
    for (const auto& j : copy->active()) ids.push_back(j.judgment.id);
    EXPECT_EQ(ids, live);
  }
}

// ---------------------------------------------------------------------------
// HTTP front end on an ephemeral localhost port.

class HttpSession : public ::testing::Test {
 protected:
  void SetUp() override {
    service_ = std::make_unique<qp::SessionService>(memory_config());
    front_ = std::make_unique<qp::HttpFrontEnd>(*service_);
    port_ = front_->bind_any("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { front_->run(); });
    front_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    front_->stop();
    if (thread_.joinable()) thread_.join();
  }

  std::pair<int, Json> call(const std::string& method, const std::string& path, const Json& body = nullptr) {
    httplib::Result res;
    if (method == "POST") res = client_->Post(path, body.dump(), "application/json");
    else if (method == "DELETE") res = client_->Delete(path);
    else res = client_->Get(path);
    if (!res) {
      ADD_FAILURE() << "no response for " << method << " " << path;
      return {0, nullptr};
    }
    return {res->status, Json::parse(res->body)};
  }

  std::unique_ptr<qp::SessionService> service_;
  std::unique_ptr<qp::HttpFrontEnd> front_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(HttpSession, RoundTrip) {
  auto [code, created] = call("POST", "/v1/sessions", Json{{"space", "worlds: w1 w2 w3"}});
  ASSERT_EQ(code, 201);
  EXPECT_EQ(created["schema"], 1);
  auto base = "/v1/sessions/" + id_of(created);

  auto [c1, s1] = call("POST", base + "/judgments", Json{{"lhs", "w1"}, {"rel", ">="}, {"rhs", "w2"}});
  EXPECT_EQ(c1, 200);
  EXPECT_EQ(s1["changed"], "j1");
  call("POST", base + "/judgments", Json{{"lhs", "w2"}, {"rel", ">="}, {"rhs", "w3"}});

  auto [cb, b] = call("GET", base + "/bounds?event=w1");
  EXPECT_EQ(cb, 200);
  EXPECT_EQ(b["bounds"]["lower"], "1/3");
  EXPECT_EQ(b["bounds"]["upper"], "1");
  EXPECT_EQ(b["revision"], 2);

  auto [cg, bg] = call("GET", base + "/bounds?event=w1&given=w1%20or%20w2");
  EXPECT_EQ(cg, 200);
  EXPECT_EQ(bg["bounds"]["lower"], "1/2");

  auto [ce, e] = call("GET", base + "/entails?lhs=w1%20or%20w3&rhs=w2%20or%20w3");
  EXPECT_EQ(ce, 200);
  EXPECT_TRUE(e["entailment"]["always"].get<bool>());

  EXPECT_EQ(call("GET", base + "/status").first, 200);
  EXPECT_EQ(call("GET", base + "/report").first, 200);
  auto [cr, r] = call("GET", base + "/realization");
  EXPECT_EQ(cr, 200);
  EXPECT_TRUE(r["realization"]["realizable"].get<bool>());

  auto [cx, x] = call("POST", base + "/judgments", Json{{"lhs", "w3"}, {"rel", ">"}, {"rhs", "w1"}});
  EXPECT_EQ(cx, 200);
  EXPECT_FALSE(x["consistent"].get<bool>());
  EXPECT_EQ(x["conflict"], (Json{"j1", "j2", "j3"}));
  EXPECT_EQ(call("GET", base + "/bounds?event=w1").first, 409);

  auto [cd, d] = call("DELETE", base + "/judgments/j3");
  EXPECT_EQ(cd, 200);
  EXPECT_TRUE(d["consistent"].get<bool>());
  EXPECT_EQ(call("DELETE", base + "/judgments/j3").first, 404);
}

TEST_F(HttpSession, ErrorStatuses) {
  auto [c0, bad] = call("POST", "/v1/sessions", Json{{"space", "worlds: a T"}});
  EXPECT_EQ(c0, 400);
  EXPECT_EQ(bad["error"], "invalid_space");
  EXPECT_EQ(bad["offset"], 10);
  EXPECT_EQ(call("POST", "/v1/sessions", Json{{"space", "atoms: a b c d"}}).first, 422);
  EXPECT_EQ(call("POST", "/v1/sessions", Json{{"worlds", "a b"}}).first, 400);
  EXPECT_EQ(call("GET", "/v1/sessions/0123abcd/status").first, 404);

  auto [code, created] = call("POST", "/v1/sessions", Json{{"space", "worlds: a b"}});
  ASSERT_EQ(code, 201);
  auto base = "/v1/sessions/" + id_of(created);
  auto [cp, p] = call("POST", base + "/judgments", Json{{"lhs", "a and"}, {"rel", ">"}, {"rhs", "b"}});
  EXPECT_EQ(cp, 400);
  EXPECT_EQ(p["error"], "syntax_error");
  EXPECT_EQ(p["offset"], 5);
  EXPECT_EQ(call("POST", base + "/judgments", Json{{"lhs", "a"}, {"rel", "<"}, {"rhs", "b"}}).first, 400);
  EXPECT_EQ(call("GET", base + "/bounds").first, 400);
  EXPECT_EQ(call("GET", base + "/bounds?event=a&given=F").first, 422);

  httplib::Result raw = client_->Post(base + "/judgments", "{not json", "application/json");
  ASSERT_TRUE(raw);
  EXPECT_EQ(raw->status, 400);
}

TEST_F(HttpSession, ConcurrentSessionsStaySeparate) {
  std::vector<std::string> ids;
  for (int k = 0; k < 4; ++k) ids.push_back(id_of(call("POST", "/v1/sessions", Json{{"space", "worlds: a b c"}}).second));
  std::vector<std::thread> workers;
  for (int k = 0; k < 4; ++k) {
    workers.emplace_back([&, k] {
      httplib::Client cli("127.0.0.1", port_);
      for (int step = 0; step < 5; ++step) {
        Json body{{"lhs", "a"}, {"rel", ">="}, {"rhs", k % 2 ? "b" : "c"}};
        auto res = cli.Post("/v1/sessions/" + ids[k] + "/judgments", body.dump(), "application/json");
        ASSERT_TRUE(res);
        EXPECT_EQ(res->status, 200);
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& id : ids) {
    auto s = call("GET", "/v1/sessions/" + id + "/status").second;
    EXPECT_EQ(s["revision"], 5);
    EXPECT_EQ(s["judgments"].size(), 5U);
  }
}
