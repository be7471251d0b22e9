#include <gtest/gtest.h>

#include "brute_ill.hpp"
#include "gcq/ill.hpp"

using namespace gcq;

namespace {

FormulaPtr own(const char* t, const char* a, std::set<std::string> caps) {
  CapSet cs;
  for (const auto& c : caps) cs.insert(CapAtom(c));
  return ill::own(Thread(t), SessionKey("k"), Role(a), cs);
}

}  // namespace

TEST(Prover, AxiomOnMatchingOwnership) {
  auto r = prove({own("t", "A", {"X"})}, own("t", "A", {"X"}));
  ASSERT_TRUE(r.provable);
  EXPECT_TRUE(replay(*r.certificate));
}

TEST(Prover, TensorOfTwoOwnerships) {
  auto goal = ill::tensor(own("t", "A", {"X"}), own("s", "B", {"Y"}));
  auto r = prove({own("t", "A", {"X"}), own("s", "B", {"Y"})}, goal);
  ASSERT_TRUE(r.provable);
  EXPECT_TRUE(replay(*r.certificate));
  EXPECT_TRUE(gcqtest::brute_prove({own("t", "A", {"X"}), own("s", "B", {"Y"})}, goal));
}

TEST(Prover, CapabilityMismatchIsUnprovable) {
  EXPECT_FALSE(prove({own("t", "A", {"X"})}, own("t", "A", {"Y"})).provable);
}

TEST(Prover, NoWeakeningOrContraction) {
  auto a = ill::atom("a");
  EXPECT_FALSE(prove({a, a}, a).provable);
  EXPECT_FALSE(prove({a}, ill::tensor(a, a)).provable);
  EXPECT_TRUE(prove({a, a}, ill::tensor(a, a)).provable);
}

TEST(Prover, AdditivesAndImplication) {
  auto a = ill::atom("a"), b = ill::atom("b"), c = ill::atom("c");
  EXPECT_TRUE(prove({ill::plus(a, b)}, ill::plus(b, a)).provable);
  EXPECT_TRUE(prove({a, ill::lolli(a, b)}, b).provable);
  EXPECT_FALSE(prove({ill::lolli(a, b)}, b).provable);
  EXPECT_TRUE(prove({}, ill::lolli(ill::tensor(a, b), ill::tensor(b, a))).provable);
  EXPECT_TRUE(prove({ill::lolli(a, ill::lolli(b, c)), a, b}, c).provable);
  EXPECT_TRUE(prove({ill::truth(), a}, a).provable);
  EXPECT_TRUE(prove({}, ill::truth()).provable);
  EXPECT_FALSE(prove({a}, ill::truth()).provable);
}

TEST(Prover, CertificatesReplayAndTamperingIsDetected) {
  auto a = ill::atom("a"), b = ill::atom("b");
  auto r = prove({ill::tensor(a, b)}, ill::tensor(b, a));
  ASSERT_TRUE(r.provable);
  EXPECT_TRUE(replay(*r.certificate));
  ProofNode bad = *r.certificate;
  bad.goal = ill::tensor(a, a);
  EXPECT_FALSE(replay(bad));
}

TEST(Prover, DepthLimitIsReported) {
  auto a = ill::atom("a");
  FormulaPtr g = a;
  IllContext ctx{a};
  for (int i = 0; i < 10; ++i) {
    g = ill::tensor(g, a);
    ctx.push_back(a);
  }
  ProverOptions o;
  o.max_depth = 3;
  EXPECT_THROW(prove(ctx, g, o), DepthExceeded);
}
