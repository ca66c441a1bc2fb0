#include "qualprob/algebra.hpp"

#include "support.hpp"

namespace qp = qualprob;
using qp::Event;
using qp::Sentence;
using qp::SentencePtr;
using testing_support::Gen;

namespace {

// Truth-table oracle: does world `w` satisfy the tree? Written against the
// tree directly, without going through Event arithmetic.
bool holds(const Sentence& s, const qp::Space& space, std::size_t w) {
  switch (s.kind) {
    case Sentence::Kind::True: return true;
    case Sentence::Kind::False: return false;
    case Sentence::Kind::Atom: {
      auto idx = *space.index_of(s.name);
      return space.mode() == qp::SpaceMode::Worlds ? idx == w : ((w >> idx) & 1U) != 0;
    }
    case Sentence::Kind::Not: return !holds(*s.left, space, w);
    case Sentence::Kind::And: return holds(*s.left, space, w) && holds(*s.right, space, w);
    case Sentence::Kind::Or: return holds(*s.left, space, w) || holds(*s.right, space, w);
  }
  return false;
}

qp::Mask truth_table(const Sentence& s, const qp::Space& space) {
  qp::Mask m = 0;
  for (std::size_t w = 0; w < space.world_count(); ++w) {
    if (holds(s, space, w)) m |= qp::Mask{1} << w;
  }
  return m;
}

SentencePtr random_tree(Gen& g, const std::vector<std::string>& names, int depth) {
  int pick = depth == 0 ? g.between(0, 2) : g.between(0, 5);
  switch (pick) {
    case 0: return Sentence::atom(names[g.below(names.size())]);
    case 1: return g.coin() ? Sentence::truth() : Sentence::falsity();
    case 2: return Sentence::atom(names[g.below(names.size())]);
    case 3: return Sentence::negation(random_tree(g, names, depth - 1));
    case 4: return Sentence::conjunction(random_tree(g, names, depth - 1), random_tree(g, names, depth - 1));
    default: return Sentence::disjunction(random_tree(g, names, depth - 1), random_tree(g, names, depth - 1));
  }
}

}  // namespace

TEST(Space, AtomsAndWorlds) {
  auto a = qp::Space::atoms({"x", "y"});
  EXPECT_EQ(a->world_count(), 4u);
  EXPECT_EQ(a->event_count(), 16u);
  EXPECT_EQ(a->world_label(1), "x&~y");
  auto w = qp::Space::worlds({"w1", "w2", "w3"});
  EXPECT_EQ(w->world_count(), 3u);
  EXPECT_EQ(w->declaration(), "worlds: w1 w2 w3");
  EXPECT_EQ(a->declaration(), "atoms: x y");
}

TEST(Space, RejectsBadNames) {
  EXPECT_QP_ERROR(qp::Space::worlds({"w1", "w1"}), qp::ErrorCode::InvalidSpace);
  EXPECT_QP_ERROR(qp::Space::worlds({"T"}), qp::ErrorCode::InvalidSpace);
  EXPECT_QP_ERROR(qp::Space::atoms({"and"}), qp::ErrorCode::InvalidSpace);
  EXPECT_QP_ERROR(qp::Space::worlds({"1x"}), qp::ErrorCode::InvalidSpace);
  EXPECT_QP_ERROR(qp::Space::worlds({}), qp::ErrorCode::InvalidSpace);
}

TEST(Parse, Constants) {
  EXPECT_EQ(qp::parse_sentence("T")->kind, Sentence::Kind::True);
  EXPECT_EQ(qp::parse_sentence(" F ")->kind, Sentence::Kind::False);
}

TEST(Parse, ContradictionShape) {
  auto s = qp::parse_sentence("x and ~x");
  auto expected = Sentence::conjunction(Sentence::atom("x"), Sentence::negation(Sentence::atom("x")));
  EXPECT_TRUE(qp::same_tree(*s, *expected));
}

TEST(Parse, PrecedenceNotAndOr) {
  // Hand trace: parse_or reads parse_and, which reads parse_not for "~a", sees
  // `or`, then parse_and reads b, sees `and`, reads c.
  auto s = qp::parse_sentence("~a or b and c");
  auto expected = Sentence::disjunction(Sentence::negation(Sentence::atom("a")),
                                        Sentence::conjunction(Sentence::atom("b"), Sentence::atom("c")));
  EXPECT_TRUE(qp::same_tree(*s, *expected));
}

TEST(Parse, LeftAssociative) {
  auto s = qp::parse_sentence("a | b | c");
  auto expected = Sentence::disjunction(Sentence::disjunction(Sentence::atom("a"), Sentence::atom("b")),
                                        Sentence::atom("c"));
  EXPECT_TRUE(qp::same_tree(*s, *expected));
  auto t = qp::parse_sentence("not not a & b");
  auto expected_t =
      Sentence::conjunction(Sentence::negation(Sentence::negation(Sentence::atom("a"))), Sentence::atom("b"));
  EXPECT_TRUE(qp::same_tree(*t, *expected_t));
}

TEST(Parse, ErrorsCarryOffsets) {
  auto offset_of = [](std::string_view text) -> std::optional<std::size_t> {
    try {
      qp::parse_sentence(text);
    } catch (const qp::Error& e) {
      EXPECT_EQ(e.code(), qp::ErrorCode::SyntaxError) << text;
      return e.offset();
    }
    return std::nullopt;
  };
  EXPECT_EQ(offset_of("w1 and"), std::optional<std::size_t>(6));
  EXPECT_EQ(offset_of("a || b"), std::optional<std::size_t>(2));
  EXPECT_EQ(offset_of("a && b"), std::optional<std::size_t>(2));
  EXPECT_EQ(offset_of("(a"), std::optional<std::size_t>(2));
  EXPECT_EQ(offset_of("a b"), std::optional<std::size_t>(2));
  EXPECT_EQ(offset_of(""), std::optional<std::size_t>(0));
  EXPECT_EQ(offset_of("a $ b"), std::optional<std::size_t>(2));
}

TEST(Evaluate, Examples) {
  auto xy = qp::Space::atoms({"x", "y"});
  auto e = qp::event_of("x or y", xy);
  EXPECT_EQ(e.size(), 3u);
  EXPECT_FALSE(e.contains(0));  // world 0 is ~x & ~y
  auto w = qp::Space::numbered_worlds(3);
  EXPECT_TRUE(qp::event_of("x and ~x", xy).is_bottom());
  EXPECT_EQ(qp::event_of("w1 or w3", w).members(), (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(qp::event_of("T", w).is_top());
  EXPECT_QP_ERROR(qp::event_of("w4", w), qp::ErrorCode::UnknownAtom);
}

TEST(Events, BooleanOperations) {
  auto s = qp::Space::numbered_worlds(3);
  EXPECT_TRUE(qp::complement(Event::top(s)).is_bottom());
  EXPECT_EQ(qp::unite(Event::world(s, 0), Event::world(s, 2)).mask(), 0b101u);
  EXPECT_EQ(qp::difference(Event::top(s), Event::world(s, 1)).mask(), 0b101u);
  for (qp::Mask m = 0; m < 8; ++m) EXPECT_TRUE(qp::implies(Event::bottom(s), Event(s, m)));
  auto other = qp::Space::numbered_worlds(2);
  EXPECT_QP_ERROR(qp::unite(Event::top(s), Event::top(other)), qp::ErrorCode::SpaceMismatch);
  EXPECT_QP_ERROR(Event(s, 0b1000), qp::ErrorCode::InvalidSpace);
}

TEST(Events, FormatAndSentenceFor) {
  auto s = qp::Space::numbered_worlds(3);
  EXPECT_EQ(qp::format_event(Event(s, 0b101)), "{w1,w3}");
  EXPECT_EQ(qp::format_event(Event::top(s)), "T");
  EXPECT_EQ(qp::format_event(Event::bottom(s)), "F");
  auto xyz = qp::Space::atoms({"x", "y", "z"});
  for (qp::Mask m = 0; m < 256; ++m) {
    Event e(xyz, m);
    EXPECT_EQ(qp::event_of(qp::sentence_for(e), xyz), e);
  }
  for (qp::Mask m = 0; m < 8; ++m) {
    Event e(s, m);
    EXPECT_EQ(qp::event_of(qp::sentence_for(e), s), e);
  }
}

TEST(Properties, DeMorganExhaustive) {
  for (std::size_t n = 1; n <= 4; ++n) {
    auto s = qp::Space::numbered_worlds(n);
    for (qp::Mask a = 0; a < s->event_count(); ++a) {
      for (qp::Mask b = 0; b < s->event_count(); ++b) {
        Event ea(s, a), eb(s, b);
        EXPECT_EQ(~(ea | eb), ~ea & ~eb);
        EXPECT_EQ(~(ea & eb), ~ea | ~eb);
      }
    }
  }
}

TEST(Properties, ImplicationIsPartialOrder) {
  auto s = qp::Space::numbered_worlds(4);
  const qp::Mask n = 16;
  for (qp::Mask a = 0; a < n; ++a) {
    Event ea(s, a);
    EXPECT_TRUE(qp::implies(ea, ea));
    for (qp::Mask b = 0; b < n; ++b) {
      Event eb(s, b);
      if (qp::implies(ea, eb) && qp::implies(eb, ea)) {
        EXPECT_EQ(a, b);
      }
      for (qp::Mask c = 0; c < n; ++c) {
        Event ec(s, c);
        if (qp::implies(ea, eb) && qp::implies(eb, ec)) {
          EXPECT_TRUE(qp::implies(ea, ec));
        }
      }
    }
  }
}

TEST(Properties, EvaluateMatchesTruthTableAndRenderRoundTrips) {
  Gen g(4242);
  auto atoms = qp::Space::atoms({"p", "q", "r"});
  auto worlds = qp::Space::worlds({"u", "v", "w", "z"});
  for (int trial = 0; trial < 500; ++trial) {
    const auto& space = trial % 2 ? atoms : worlds;
    auto tree = random_tree(g, space->names(), 4);
    auto e = qp::evaluate(*tree, space);
    EXPECT_EQ(e.mask(), truth_table(*tree, *space));
    auto text = qp::render(*tree);
    auto back = qp::parse_sentence(text);
    EXPECT_TRUE(qp::same_tree(*tree, *back)) << text;
    EXPECT_EQ(qp::evaluate(*back, space), e) << text;
  }
}
