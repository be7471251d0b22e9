#include <gtest/gtest.h>

#include "gcq/cap_check.hpp"
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

}  // namespace

TEST(CapCheck, SensorExamples) {
  IllContext truth{ill::truth()};
  EXPECT_TRUE(check_capabilities(truth, load("sensors_all.gcq")).ok);
  EXPECT_TRUE(check_capabilities(truth, load("sensors_all_any.gcq")).ok);
  EXPECT_TRUE(check_capabilities(truth, load("sensors_23.gcq")).ok);
  auto r = check_capabilities(truth, load("sensors_any_all.gcq"));
  ASSERT_FALSE(r.ok);
  EXPECT_EQ(r.failures[0].code, "CapabilityUnderivable");
  EXPECT_FALSE(check_capabilities(truth, load("sensors_select_23.gcq")).ok);
  EXPECT_FALSE(check_capabilities(truth, load("fig2_blocking.gcq")).ok);
  EXPECT_TRUE(check_capabilities({}, load("typed_temperature.gcq")).ok);
}

TEST(CapCheck, MissingAtomsAreNamed) {
  auto r = check_capabilities({}, parse_chor("start a(k) (p[A]{X}) -> (q[B]{Y}); bcast k [all] p[A]{Z;W} . 1 -> (q[B]{Y;Y} : x); end"));
  ASSERT_FALSE(r.ok);
  ASSERT_EQ(r.failures[0].missing.size(), 1u);
  EXPECT_EQ(r.failures[0].missing[0], "p:k[A]{Z}");
}

TEST(CapCheck, FreshnessAgainstContext) {
  IllContext psi{ill::own(Thread("q"), SessionKey("other"), Role("B"), {})};
  // The service thread name clashes with the context; renaming apart resolves it.
  EXPECT_TRUE(check_capabilities(psi, parse_chor("start a(k) (p[A]) -> (q[B]); end")).ok);
}

TEST(CapCheck, LolliInContextIsRejected) {
  IllContext psi{ill::lolli(ill::atom("a"), ill::atom("b"))};
  auto r = check_capabilities(psi, ch::end());
  ASSERT_FALSE(r.ok);
  EXPECT_EQ(r.failures[0].code, "ContextHasLolli");
}

TEST(StateSatisfaction, Definition) {
  CapabilityState s;
  s.set(Thread("t"), SessionKey("k"), caps({"X"}));
  auto own = ill::own(Thread("t"), SessionKey("k"), Role("A"), caps({"X"}));
  EXPECT_TRUE(state_satisfies(s, own));
  EXPECT_TRUE(state_satisfies(s, ill::truth()));
  EXPECT_TRUE(state_satisfies(CapabilityState{}, ill::truth()));
  EXPECT_FALSE(state_satisfies(s, ill::tensor(own, own)));
  s.set(Thread("u"), SessionKey("k"), caps({"Y"}));
  auto own2 = ill::own(Thread("u"), SessionKey("k"), Role("B"), caps({"Y"}));
  EXPECT_TRUE(state_satisfies(s, ill::tensor(own, own2)));
  EXPECT_TRUE(state_satisfies(s, IllContext{own, own2}));
}

TEST(CapCheck, GeneratedProgramsAreWellTyped) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto p = gcqtest::generate_program(rng);
    auto r = check_capabilities({}, p.body);
    EXPECT_TRUE(r.ok) << pretty_print(p.body) << "\n" << (r.failures.empty() ? "" : r.failures[0].message);
  }
}
