#include <gtest/gtest.h>

#include "gcq/global_sem.hpp"
#include "gcq/parser.hpp"
#include "generator.hpp"

using namespace gcq;

namespace {

ChorPtr load(const std::string& name) {
  ParseOptions o;
  o.allow_partial_select = true;
  return parse(gcqtest::read_program_file(name), o).body;
}

CapSet caps(std::set<std::string> xs) {
  CapSet out;
  for (const auto& x : xs) out.insert(CapAtom(x));
  return out;
}

// Interactions met along each root-to-end path, as sorted multisets.
std::set<std::vector<std::string>> path_multisets(const ChorPtr& c) {
  if (c->is_end()) return {{}};
  if (auto* s = std::get_if<Chor::Seq>(&c->node)) {
    std::set<std::vector<std::string>> out;
    for (auto p : path_multisets(s->next)) {
      p.push_back(print_interaction(s->act));
      std::sort(p.begin(), p.end());
      out.insert(p);
    }
    return out;
  }
  const auto& i = std::get<Chor::If>(c->node);
  auto a = path_multisets(i.then_branch);
  auto b = path_multisets(i.else_branch);
  a.insert(b.begin(), b.end());
  return a;
}

std::vector<std::string> names(const std::vector<Thread>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(t.str());
  return out;
}

}  // namespace

TEST(GlobalSem, InitGivesOfferedCapabilities) {
  auto conf = make_configuration(load("sensors_all.gcq"));
  auto ts = enabled(conf);
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].label.kind, GLabel::Kind::Init);
  const auto& s = ts[0].next.sigma;
  EXPECT_EQ(s.entries().size(), 4u);
  for (int i = 0; i < 4; ++i)
    EXPECT_EQ(s.lookup(Thread("t" + std::to_string(i)), SessionKey("k")), caps({"Acc" + std::to_string(i)}));
}

TEST(GlobalSem, PartialSelectAdvancesChosenSubsetOnly) {
  auto conf = enabled(make_configuration(load("sensors_select_23.gcq")))[0].next;
  bool found = false;
  for (const auto& t : enabled(conf)) {
    if (t.label.kind != GLabel::Kind::Select) continue;
    if (names(t.label.chosen) != std::vector<std::string>{"t2", "t3"}) continue;
    found = true;
    CapabilityState want;
    want.set(Thread("t0"), SessionKey("k"), caps({"Ms0"}));
    want.set(Thread("t1"), SessionKey("k"), caps({"Acc1"}));
    want.set(Thread("t2"), SessionKey("k"), caps({"Ms2"}));
    want.set(Thread("t3"), SessionKey("k"), caps({"Ms3"}));
    EXPECT_EQ(t.next.sigma, want);
  }
  EXPECT_TRUE(found);
}

TEST(GlobalSem, EndHasNoTransitionsAndStepThrows) {
  auto conf = make_configuration(ch::end());
  EXPECT_TRUE(enabled(conf).empty());
  EXPECT_THROW(step(conf, 0), Stuck);
}

TEST(GlobalSem, DisjointInteractionsFireInEitherOrder) {
  auto c = parse_chor("bcast k [all] a[A] . 1 -> (b[B] : x); bcast k [all] c[C] . 2 -> (d[D] : y); end");
  auto ts = enabled(make_configuration(c));
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(std::get<Bcast>(*ts[0].label.act).sender.thread.str(), "a");
  EXPECT_EQ(std::get<Bcast>(*ts[1].label.act).sender.thread.str(), "c");
}

TEST(GlobalSem, SharedThreadBlocksReordering) {
  auto c = parse_chor("bcast k [all] a[A] . 1 -> (b[B] : x); bcast k [all] a[A] . 2 -> (d[D] : y); end");
  EXPECT_EQ(enabled(make_configuration(c)).size(), 1u);
}

TEST(GlobalSem, ConditionalTakesThenBranchOnTrue) {
  auto c = parse_chor("if 1 < 2 @ p { bcast k [all] p[A] . 1 -> (q[B] : x); end } else { end }");
  auto ts = enabled(make_configuration(c));
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].label.kind, GLabel::Kind::Tau);
  EXPECT_TRUE(ts[0].label.tau_then);
  EXPECT_FALSE(ts[0].next.chor->is_end());
}

TEST(GlobalSem, BroadcastSubstitutesNoneOutsideChosenSet) {
  auto c = parse_chor(
      "bcast k [any] a[A] . 7 -> (b[B] : x, c[C] : y); "
      "if x = some(7) @ b { end } else { bcast k [all] b[B] . 0 -> (a[A] : z); end }");
  auto ts = enabled(make_configuration(c));
  ASSERT_EQ(ts.size(), 3u);  // {b,c}, {b}, {c}
  EXPECT_EQ(names(ts[2].label.chosen), std::vector<std::string>{"c"});
  auto after = enabled(ts[2].next);
  ASSERT_EQ(after.size(), 1u);
  EXPECT_FALSE(after[0].label.tau_then);  // x became none at b
}

TEST(GlobalSem, RunCompletesSensorProtocol) {
  auto tr = run(make_configuration(load("sensors_all.gcq")), AllAvailable{}, Policy{}, 100);
  EXPECT_EQ(tr.verdict, Verdict::Completed);
  EXPECT_EQ(tr.labels.size(), 3u);
  ASSERT_TRUE(tr.labels[2].value.has_value());
  EXPECT_EQ(*tr.labels[2].value, Value(1));  // avg(1,-2,5) = 4/3 truncated
}

TEST(GlobalSem, BlockingVariantGetsStuckWhenOnlyT2Answers) {
  ScriptOracle o({{"t0", "t1", "t2", "t3"}, {"t2"}, {"t0", "t1", "t2", "t3"}});
  auto tr = run(make_configuration(load("fig2_blocking.gcq")), o, Policy{}, 100);
  EXPECT_EQ(tr.verdict, Verdict::Stuck);
  EXPECT_EQ(tr.labels.size(), 2u);
}

TEST(GlobalSem, ZeroBudget) {
  auto tr = run(make_configuration(load("sensors_all.gcq")), AllAvailable{}, Policy{}, 0);
  EXPECT_EQ(tr.verdict, Verdict::Budget);
}

TEST(GlobalSem, RandomPolicyIsReproducible) {
  auto c = make_configuration(load("sensors_23.gcq"));
  Policy p{PolicyKind::Random, 99};
  auto a = run(c, AllAvailable{}, p, 100);
  auto b = run(c, AllAvailable{}, p, 100);
  ASSERT_EQ(a.labels.size(), b.labels.size());
  for (std::size_t i = 0; i < a.labels.size(); ++i)
    EXPECT_EQ(glabel_json(a.labels[i], i).dump(), glabel_json(b.labels[i], i).dump());
}

TEST(GlobalSem, InitPicksFreshNames) {
  auto c = parse_chor("start a(k) (p[A]) -> (q[B]); start a(k) (p[A]) -> (q[B]); end");
  auto c1 = enabled(make_configuration(c))[0].next;
  auto t = enabled(c1);
  ASSERT_EQ(t.size(), 1u);
  const auto& init = std::get<Init>(*t[0].label.act);
  EXPECT_EQ(init.key.str(), "k_1");
  EXPECT_EQ(init.services[0].thread.str(), "q_1");
}

TEST(SwapEqual, Examples) {
  auto a = parse_chor("bcast k [all] a[A] . 1 -> (b[B] : x); bcast k [all] c[C] . 2 -> (d[D] : y); end");
  auto b = parse_chor("bcast k [all] c[C] . 2 -> (d[D] : y); bcast k [all] a[A] . 1 -> (b[B] : x); end");
  EXPECT_TRUE(swap_equal(a, b));
  EXPECT_TRUE(swap_equal(a, a));
  auto c = parse_chor("bcast k [all] a[A] . 1 -> (b[B] : x); bcast k [all] a[A] . 2 -> (d[D] : y); end");
  auto d = parse_chor("bcast k [all] a[A] . 2 -> (d[D] : y); bcast k [all] a[A] . 1 -> (b[B] : x); end");
  EXPECT_FALSE(swap_equal(c, d));
}

TEST(SwapEqual, NeighboursAreEquivalentAndPreserveInteractions) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    auto c = gcqtest::generate_program(rng).body;
    for (const auto& n : swap_neighbors(c)) {
      EXPECT_TRUE(swap_equal(c, n));
      EXPECT_EQ(path_multisets(c), path_multisets(n));
    }
  }
}

TEST(GlobalSem, TraceJsonShape) {
  auto tr = run(make_configuration(load("sensors_all.gcq")), AllAvailable{}, Policy{}, 100);
  auto j = glabel_json(tr.labels[1], 1);
  EXPECT_EQ(j["kind"], "select");
  EXPECT_EQ(j["session"], "k");
  EXPECT_EQ(j["sender"], "t0");
  EXPECT_EQ(j["label"], "measure");
  EXPECT_EQ(j["chosen"].size(), 3u);
}
