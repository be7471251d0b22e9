#include <gtest/gtest.h>

#include "gcq/epq.hpp"
#include "gcq/projection.hpp"
#include "generator.hpp"

using namespace gcq;

namespace {

Network net(const std::string& text) { return parse_network(text); }

std::vector<ETransition> steps(const Network& n) { return net_enabled(n); }

const Queue& queue_of(const Network& n, const std::string& k) { return n.queues.at(SessionKey(k)); }

ProcPtr proc_of(const Network& n, const std::string& t) {
  for (const auto& c : n.components)
    if (c.thread.str() == t) return c.proc;
  return nullptr;
}

Program load(const std::string& name) {
  ParseOptions o;
  o.allow_partial_select = true;
  return parse(gcqtest::read_program_file(name), o);
}

}  // namespace

TEST(EpqRules, BroadcastOutputEnqueues) {
  auto n = net("thread a : out! k[A] -> (B, C) [all] (3) . end ; queue k : [] ;");
  auto ts = steps(n);
  ASSERT_EQ(ts.size(), 1U);
  EXPECT_EQ(ts[0].label.kind, ELabel::Kind::EnqUp);
  EXPECT_EQ(ts[0].label.one, Role("A"));
  ASSERT_EQ(queue_of(ts[0].next, "k").size(), 1U);
  const auto& m = std::get<OutMsg>(queue_of(ts[0].next, "k")[0]);
  EXPECT_EQ(m.value, OptValue(Value(std::int64_t{3})));
  EXPECT_FALSE(m.to[0].second);
  EXPECT_FALSE(m.to[1].second);
  EXPECT_TRUE(std::holds_alternative<Proc::WaitOut>(proc_of(ts[0].next, "a")->node));
}

TEST(EpqRules, BroadcastInputFlagsAndSubstitutes) {
  auto n = net(
      "thread b : in? k[B] <- A (x) . out! k[B] -> C (x + 1) . end ;"
      "queue k : [(A, [all] <B:false, C:false> : some(3))] ;");
  auto ts = steps(n);
  ASSERT_EQ(ts.size(), 1U);
  EXPECT_EQ(ts[0].label.kind, ELabel::Kind::BcIn);
  EXPECT_TRUE(std::get<OutMsg>(queue_of(ts[0].next, "k")[0]).to[0].second);
  EXPECT_EQ(print_proc(proc_of(ts[0].next, "b")), print_proc(parse_proc("out! k[B] -> C (3 + 1) . end")));
}

TEST(EpqRules, DeliveredFlagBlocksSecondInput) {
  auto n = net("thread b : in? k[B] <- A (x) . end ; queue k : [(A, [all] <B:true, C:false> : some(3))] ;");
  EXPECT_TRUE(steps(n).empty());
}

TEST(EpqRules, WaitBroadcastReleasesWithNoneForStragglers) {
  auto n = net(
      "thread a : wait! k[A] -> (B, C) . end ;"
      "thread c : in? k[C] <- A (y) . out! k[C] -> A (y) . end ;"
      "queue k : [(A, [any] <B:true, C:false> : some(7))] ;");
  std::optional<ETransition> rel;
  for (auto& t : steps(n))
    if (t.label.kind == ELabel::Kind::BcOut) rel = t;
  ASSERT_TRUE(rel);
  EXPECT_TRUE(queue_of(rel->next, "k").empty());
  EXPECT_TRUE(proc_of(rel->next, "a")->is_end());
  EXPECT_EQ(print_proc(proc_of(rel->next, "c")), print_proc(parse_proc("out! k[C] -> A (none) . end")));
}

TEST(EpqRules, WaitBroadcastNeedsQuality) {
  auto n = net(
      "thread a : wait! k[A] -> (B, C) . end ;"
      "thread b : in? k[B] <- A (y) . end ;"
      "queue k : [(A, [all] <B:false, C:true> : some(7))] ;");
  for (auto& t : steps(n)) EXPECT_NE(t.label.kind, ELabel::Kind::BcOut);
}

TEST(EpqRules, WaitSelectionDiscardsStragglerBranching) {
  auto n = net(
      "thread a : wait! k[A] -> (B, C) . end ;"
      "thread c : branch? k[C] <- A { go : out! k[C] -> A (1) . end } ;"
      "queue k : [(A, [any] <B:true, C:false> : label go)] ;");
  std::optional<ETransition> rel;
  for (auto& t : steps(n))
    if (t.label.kind == ELabel::Kind::SelOut) rel = t;
  ASSERT_TRUE(rel);
  EXPECT_TRUE(proc_of(rel->next, "c")->is_end());
  EXPECT_TRUE(queue_of(rel->next, "k").empty());
}

TEST(EpqRules, BranchPicksDeliveredLabel) {
  auto n = net(
      "thread c : branch? k[C] <- A { go : end, stop : out! k[C] -> A (1) . end } ;"
      "queue k : [(A, [all] <C:false> : label stop)] ;");
  auto ts = steps(n);
  ASSERT_EQ(ts.size(), 1U);
  EXPECT_EQ(ts[0].label.kind, ELabel::Kind::SelIn);
  EXPECT_EQ(ts[0].label.label, Label("stop"));
  EXPECT_EQ(print_proc(proc_of(ts[0].next, "c")), print_proc(parse_proc("out! k[C] -> A (1) . end")));
}

TEST(EpqRules, ReduceAggregatesContributedSlots) {
  auto n = net(
      "thread m : in? k[M] <- (A, B, C) [2/3] sum (x) . out! k[M] -> Z (x) . end ;"
      "thread a : out! k[A] -> M (4) . end ;"
      "thread b : out! k[B] -> M (5) . end ;"
      "thread c : out! k[C] -> M (100) . end ;"
      "queue k : [] ;");
  // enqueue, two contributions, release: c's output is skipped.
  Network cur = n;
  auto pick = [&](ELabel::Kind k, const std::string& t) {
    for (auto& s : steps(cur))
      if (s.label.kind == k && (t.empty() || s.label.at.str() == t)) {
        cur = s.next;
        return true;
      }
    return false;
  };
  ASSERT_TRUE(pick(ELabel::Kind::EnqDown, ""));
  ASSERT_TRUE(pick(ELabel::Kind::RdOut, "a"));
  ASSERT_TRUE(pick(ELabel::Kind::RdOut, "b"));
  OptValue got;
  bool released = false;
  for (auto& s : steps(cur))
    if (s.label.kind == ELabel::Kind::RdIn) {
      got = s.label.value;
      released = true;
      cur = s.next;
    }
  ASSERT_TRUE(released);
  EXPECT_EQ(got, OptValue(Value(std::int64_t{9})));
  EXPECT_TRUE(proc_of(cur, "c")->is_end());
  EXPECT_EQ(print_proc(proc_of(cur, "m")), print_proc(parse_proc("out! k[M] -> Z (9) . end")));
}

TEST(EpqRules, OracleGatesInputs) {
  auto n = net("thread b : in? k[B] <- A (x) . end ; queue k : [(A, [all] <B:false> : some(3))] ;");
  ScriptOracle none_avail({{"zzz"}});
  EXPECT_TRUE(net_enabled(n, &none_avail, 0).empty());
  ScriptOracle b_avail({{"b"}});
  EXPECT_EQ(net_enabled(n, &b_avail, 0).size(), 1U);
}

TEST(EpqRules, SessionStartSpawnsServices) {
  auto n = net(
      "thread p : request a[A ; B](k) . out! k[A] -> (B) [all] (1) . end ;"
      "replicated s : accept! a[B](k) . in? k[B] <- A (x) . end ;");
  auto ts = steps(n);
  ASSERT_EQ(ts.size(), 1U);
  EXPECT_EQ(ts[0].label.kind, ELabel::Kind::Start);
  const auto& after = ts[0].next;
  EXPECT_EQ(after.queues.count(SessionKey("k")), 1U);
  EXPECT_EQ(after.components.size(), 3U);
  EXPECT_TRUE(proc_of(after, "s")->is_replicated());
  bool spawned = false;
  for (const auto& c : after.components)
    if (!c.proc->is_replicated() && c.thread.str() != "p") spawned = true;
  EXPECT_TRUE(spawned);
}

TEST(EpqRules, ConditionalIsSilent) {
  auto n = net("thread p : if (1 < 2) { out! k[A] -> B (1) . end } else { end } ; queue k : [] ;");
  auto ts = steps(n);
  ASSERT_EQ(ts.size(), 1U);
  EXPECT_EQ(ts[0].label.kind, ELabel::Kind::Tau);
  EXPECT_EQ(print_proc(proc_of(ts[0].next, "p")), "out! k[A] -> B (1) . end");
}

TEST(EpqCongruence, InertComponentIsUnit) {
  auto a = net("thread p : out! k[A] -> B (1) . end ; queue k : [] ;");
  auto b = net("thread p : out! k[A] -> B (1) . end ; thread q : end ; queue k : [] ;");
  EXPECT_TRUE(net_congruent(a, b));
}

TEST(EpqCongruence, OutputsToDisjointRecipientsCommute) {
  auto a = net("queue k : [(A, [all] <B:false> : some(1)) ; (A, [all] <C:false> : some(2))] ;");
  auto b = net("queue k : [(A, [all] <C:false> : some(2)) ; (A, [all] <B:false> : some(1))] ;");
  EXPECT_TRUE(net_congruent(a, b));
  EXPECT_EQ(accessible(queue_of(a, "k")).size(), 2U);
}

TEST(EpqCongruence, OutputsFromDifferentSendersCommute) {
  auto a = net("queue k : [(A, [all] <B:false> : some(1)) ; (C, [all] <B:false> : some(2))] ;");
  auto b = net("queue k : [(C, [all] <B:false> : some(2)) ; (A, [all] <B:false> : some(1))] ;");
  EXPECT_TRUE(net_congruent(a, b));
}

TEST(EpqCongruence, OverlappingOutputsDoNotCommute) {
  auto a = net("queue k : [(A, [all] <B:false, C:false> : some(1)) ; (A, [all] <C:false> : some(2))] ;");
  auto b = net("queue k : [(A, [all] <C:false> : some(2)) ; (A, [all] <B:false, C:false> : some(1))] ;");
  EXPECT_FALSE(net_congruent(a, b));
  EXPECT_EQ(accessible(queue_of(a, "k")), std::vector<std::size_t>{0});
}

TEST(EpqCongruence, InputsCommuteUnlessSharingContributorAndReceiver) {
  auto a = net("queue k : [([all] <A:false:none>, M) ; ([all] <B:false:none>, M)] ;");
  auto b = net("queue k : [([all] <B:false:none>, M) ; ([all] <A:false:none>, M)] ;");
  EXPECT_TRUE(net_congruent(a, b));
  auto c = net("queue k : [([all] <A:false:none>, M) ; ([all] <A:false:none, B:false:none>, M)] ;");
  EXPECT_EQ(accessible(queue_of(c, "k")), std::vector<std::size_t>{0});
}

TEST(EpqCongruence, MixedMessagesCommuteOnDisjointPairs) {
  auto a = net("queue k : [(A, [all] <B:false> : some(1)) ; ([all] <B:false:none>, C)] ;");
  EXPECT_EQ(accessible(queue_of(a, "k")).size(), 2U);
  auto b = net("queue k : [(A, [all] <B:false> : some(1)) ; ([all] <A:false:none>, B)] ;");
  EXPECT_EQ(accessible(queue_of(b, "k")), std::vector<std::size_t>{0});
}

TEST(EpqText, ProcessRoundTrip) {
  for (const char* s : {
           "request a[A1, A2 ; B](k) . end",
           "accept a[A](k) . end",
           "accept! a[A](k) . end",
           "out! k[A] -> (B1, B2) [any] (1 + 2) . end",
           "out! k[A] -> B (x) . end",
           "in? k[B] <- A (x) . end",
           "in? k[B] <- (A1, A2) [2/3] avg (x) . end",
           "sel! k[A] -> (B1, B2) [all] l . end",
           "branch? k[B] <- A { l1 : end, l2 : out! k[B] -> A (1) . end }",
           "wait! k[A] -> (B1, B2) . end",
           "wait? k[B] <- (A1, A2) max (x) . end",
           "if (x = 1) { end } else { out! k[A] -> B (2) . end }",
       }) {
    auto p = parse_proc(s);
    EXPECT_EQ(print_proc(p), s);
    EXPECT_TRUE(proc_equal(parse_proc(print_proc(p)), p));
  }
}

TEST(EpqText, NetworkRoundTripOnProjections) {
  for (const char* f : {"sensors_all.gcq", "sensors_23.gcq", "typed_temperature.gcq", "sensors_relay.gcq",
                        "fig2_blocking.gcq"}) {
    auto n = epp(load(f).body);
    auto back = parse_network(print_network(n));
    EXPECT_EQ(net_canonical(back, true), net_canonical(n, true)) << f;
  }
}

TEST(EpqText, SyntaxErrorsCarryOffsets) {
  try {
    parse_proc("out! k[A] -> ");
    FAIL();
  } catch (const EpqSyntaxError& e) {
    EXPECT_GT(e.offset, 0U);
  }
}

TEST(EpqRun, SensorProtocolCompletesWhenAllAvailable) {
  auto n = epp(load("sensors_all.gcq").body);
  AllAvailable all;
  auto tr = net_run(n, all, Policy{}, 200);
  EXPECT_EQ(tr.verdict, Verdict::Completed);
  EXPECT_TRUE(net_completed(tr.final));
}

TEST(EpqRun, TwoOfThreeToleratesOneWithheldSensor) {
  auto n = epp(load("sensors_23.gcq").body);
  // Withhold t3 once the selection has been released (after step 5).
  bool any_run = false;
  for (std::size_t from = 6; from < 10; ++from) {
    WithholdOracle o("t3", from);
    auto tr = net_run(n, o, Policy{}, 200);
    EXPECT_EQ(tr.verdict, Verdict::Completed) << from;
    any_run = true;
  }
  EXPECT_TRUE(any_run);
  // With t3 withheld, the reduce result is the average of the other two.
  WithholdOracle o("t3", 0);
  auto n2 = parse_network(
      "thread m : in? k[M] <- (S1, S2, S3) [2/3] avg (x) . end ;"
      "thread t1 : out! k[S1] -> M (1) . end ;"
      "thread t2 : out! k[S2] -> M (-2) . end ;"
      "thread t3 : out! k[S3] -> M (5) . end ;"
      "queue k : [] ;");
  auto tr = net_run(n2, o, Policy{}, 50);
  EXPECT_EQ(tr.verdict, Verdict::Completed);
  EXPECT_EQ(tr.labels.back().kind, ELabel::Kind::RdIn);
  // avg over {1, -2} in integer arithmetic truncates toward zero.
  EXPECT_EQ(tr.labels.back().value, OptValue(Value(std::int64_t{0})));
}

TEST(EpqRun, LoneReplicatedServiceIsQuiescent) {
  auto n = net("replicated s : accept! a[B](k) . end ;");
  AllAvailable all;
  auto tr = net_run(n, all, Policy{}, 10);
  EXPECT_TRUE(tr.labels.empty());
  EXPECT_EQ(tr.verdict, Verdict::Completed);
}

TEST(EpqRun, RandomPolicyIsDeterministicPerSeed) {
  auto n = epp(load("sensors_all_any.gcq").body);
  AllAvailable all;
  Policy p{PolicyKind::Random, 7};
  auto a = net_run(n, all, p, 200);
  auto b = net_run(n, all, p, 200);
  ASSERT_EQ(a.labels.size(), b.labels.size());
  for (std::size_t i = 0; i < a.labels.size(); ++i) EXPECT_TRUE(elabel_equal(a.labels[i], b.labels[i]));
}
