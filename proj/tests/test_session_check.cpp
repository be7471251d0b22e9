#include <gtest/gtest.h>

#include "gcq/session_check.hpp"
#include "generator.hpp"
#include "metatheory.hpp"

using namespace gcq;

namespace {

Program load(const std::string& name) {
  ParseOptions o;
  o.allow_partial_select = true;
  return parse(gcqtest::read_program_file(name), o);
}

SessionReport session_of(const std::string& text) {
  auto cut = text.find('\n');
  auto p = parse(text.substr(0, cut + 1) + "choreography { " + text.substr(cut + 1) + " }");
  return check_session_only(env_from_program(p), p.body);
}

std::string code_of(const SessionReport& r) { return r.failures.empty() ? "" : r.failures[0].code; }

}  // namespace

TEST(SessionCheck, GoldenProgramsConform) {
  for (const char* f : {"sensors_all.gcq", "sensors_all_any.gcq", "sensors_any_all.gcq", "sensors_23.gcq",
                        "sensors_select_23.gcq", "typed_temperature.gcq", "fig2_blocking.gcq"}) {
    auto p = load(f);
    auto r = check_session_only(env_from_program(p), p.body);
    EXPECT_TRUE(r.ok) << f << ": " << (r.failures.empty() ? "" : r.failures[0].message);
  }
}

TEST(SessionCheck, TypedExampleWithEmptyContext) {
  auto p = load("typed_temperature.gcq");
  EXPECT_TRUE(check_session(env_from_program(p), {}, p.body).ok());
}

TEST(SessionCheck, EndNeedsFinishedSessions) {
  SessionEnv g;
  EXPECT_TRUE(check_session_only(g, ch::end(), {{SessionKey("k"), gt::end()}}).ok);
  auto r = check_session_only(g, ch::end(), {{SessionKey("k"), gt::bcast(Role("A"), {Role("B")}, Sort::Int, gt::end())}});
  EXPECT_EQ(code_of(r), "ProtocolResidue");
}

TEST(SessionCheck, PayloadSortMismatch) {
  auto r = session_of(
      "service a : bcast A -> (B) : int . end ;\n"
      "start a(k) (p[A]) -> (q[B]); bcast k [all] p[A] . date(\"2026-10-16\") -> (q[B] : x); end");
  EXPECT_EQ(code_of(r), "SortMismatch");
}

TEST(SessionCheck, ReceivedVariableTakesTheSort) {
  EXPECT_TRUE(session_of("service a : bcast A -> (B) : int . bcast B -> (A) : int . end ;\n"
                         "start a(k) (p[A]) -> (q[B]); bcast k [all] p[A] . 1 -> (q[B] : x);"
                         " bcast k [all] q[B] . x + 1 -> (p[A] : y); end")
                  .ok);
  auto r = session_of("service a : bcast A -> (B) : int . bcast B -> (A) : bool . end ;\n"
                      "start a(k) (p[A]) -> (q[B]); bcast k [all] p[A] . 1 -> (q[B] : x);"
                      " bcast k [all] q[B] . x + 1 -> (p[A] : y); end");
  EXPECT_EQ(code_of(r), "SortMismatch");
}

TEST(SessionCheck, Failures) {
  EXPECT_EQ(code_of(session_of("service a : bcast A -> (B) : int . end ;\nstart b(k) (p[A]) -> (q[B]); end")),
            "UnknownService");
  EXPECT_EQ(code_of(session_of("service a : bcast A -> (B) : int . end ;\n"
                               "start a(k) (p[A]) -> (q[B]); bcast k [all] q[B] . 1 -> (p[A] : x); end")),
            "ProtocolMismatch");
  EXPECT_EQ(code_of(session_of("service a : bcast A -> (B) : int . end ;\n"
                               "start a(k) (p[A]) -> (q[B]); bcast k [all] q[A] . 1 -> (p[B] : x); end")),
            "RoleNotOwned");
  EXPECT_EQ(code_of(session_of("service a : branch A -> (B) { l : end } ;\n"
                               "start a(k) (p[A]) -> (q[B]); select k [all] p[A] -> (q[B]) : m; end")),
            "LabelNotOffered");
  EXPECT_EQ(code_of(session_of("service a : bcast A -> (B) : int . end ;\nstart a(k) (p[A]) -> (q[B]); end")),
            "ProtocolResidue");
  EXPECT_EQ(code_of(session_of("service a : <A ; B> end ;\nstart a(k) (p[A]) -> (q[B]); if 3 @ p { end } else { end }")),
            "NotAProposition");
  EXPECT_EQ(code_of(session_of("service a : <A ; B> bcast A -> (B) : int . end ;\n"
                               "start a(k) (p[B]) -> (q[A]); bcast k [all] q[A] . 1 -> (p[B] : x); end")),
            "ServiceSplitMismatch");
  // Binders are renamed apart, so reusing a service thread name yields a distinct thread.
  EXPECT_FALSE(session_of("service a : bcast A -> (B) : int . end ;\n"
                          "start a(k) (p[A]) -> (q[B]); start a(k2) (r[A]) -> (q[B]);"
                          " bcast k [all] p[A] . 1 -> (q[B] : x); bcast k2 [all] r[A] . 1 -> (q[B] : x); end")
                   .ok);
}

TEST(SessionCheck, TypeSwapsAllowReordering) {
  EXPECT_TRUE(session_of("service a : bcast A -> (B) : int . bcast C -> (D) : int . end ;\n"
                         "start a(k) (p[A], r[C]) -> (q[B], s[D]); bcast k [all] r[C] . 2 -> (s[D] : y);"
                         " bcast k [all] p[A] . 1 -> (q[B] : x); end")
                  .ok);
}

TEST(SessionCheck, TypeLabels) {
  auto p = load("sensors_all.gcq");
  auto conf = make_configuration(p.body);
  auto gamma = env_from_program(p);
  auto t0 = enabled(conf);
  ASSERT_EQ(t0.size(), 1u);
  EXPECT_FALSE(type_label(t0[0].label, gamma).has_value());
  const auto& init = std::get<Init>(*t0[0].label.act);
  for (const auto& q : participants(init)) gamma.owners[{q.thread, init.key}] = q.role;
  auto t1 = enabled(t0[0].next);
  ASSERT_FALSE(t1.empty());
  auto tl = type_label(t1[0].label, gamma);
  ASSERT_TRUE(tl.has_value());
  EXPECT_EQ(tl->first, init.key);
  EXPECT_EQ(tl->second.kind, TypeLabel::Kind::Sel);
  EXPECT_EQ(tl->second.label, Label("measure"));
  auto t2 = enabled(t1[0].next);
  ASSERT_FALSE(t2.empty());
  auto red = type_label(t2[0].label, gamma);
  ASSERT_TRUE(red.has_value());
  EXPECT_EQ(red->second.kind, TypeLabel::Kind::Red);
  EXPECT_EQ(red->second.sort, Sort::Int);
  EXPECT_THROW(type_label(t2[0].label, SessionEnv{}), Untypable);
}

TEST(SessionCheck, GeneratedProgramsConform) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    auto p = gcqtest::generate_program(rng);
    auto r = check_session(env_from_program(p), {}, p.body);
    EXPECT_TRUE(r.ok()) << print_program(p) << "\n"
                        << (r.session.failures.empty() ? "" : r.session.failures[0].message);
  }
}

TEST(Metatheory, PreservationAndProgressOnGolden) {
  for (const char* f : {"sensors_all.gcq", "sensors_all_any.gcq", "sensors_23.gcq", "typed_temperature.gcq"}) {
    auto p = load(f);
    auto pr = gcqtest::check_preservation(p);
    EXPECT_TRUE(pr.ok) << f << ": " << pr.failure;
    auto pg = gcqtest::check_progress(p);
    EXPECT_TRUE(pg.ok) << f << ": " << pg.failure;
  }
}

TEST(Metatheory, ProgressFailsOnBlockingExample) {
  auto pg = gcqtest::check_progress(load("fig2_blocking.gcq"));
  EXPECT_FALSE(pg.ok);
}

TEST(Metatheory, PreservationOnGenerated) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 60; ++i) {
    auto p = gcqtest::generate_program(rng);
    auto pr = gcqtest::check_preservation(p);
    EXPECT_TRUE(pr.ok) << print_program(p) << "\n" << pr.failure;
    auto pg = gcqtest::check_progress(p);
    EXPECT_TRUE(pg.ok) << print_program(p) << "\n" << pg.failure;
  }
}
