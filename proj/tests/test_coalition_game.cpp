#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "oracles.hpp"
#include "shapcred/coalition_game.hpp"
#include "shapcred/errors.hpp"
#include "shapcred/rng.hpp"

using namespace shapcred;

namespace {

/// Two left gloves (players 0, 1) and one right glove (player 2): a pair is worth 1.
FunctionGame glove_game()
{
   return FunctionGame(3, [](const Coalition& s) {
      const double left = (s.contains(0) ? 1. : 0.) + (s.contains(1) ? 1. : 0.);
      const double right = s.contains(2) ? 1. : 0.;
      return std::min(left, right);
   });
}

}  // namespace

TEST(ExactShapley, GloveGame)
{
   const auto phi = exact_shapley(glove_game()).values;
   EXPECT_NEAR(phi[0], 1. / 6., 1e-12);
   EXPECT_NEAR(phi[1], 1. / 6., 1e-12);
   EXPECT_NEAR(phi[2], 2. / 3., 1e-12);
}

TEST(ExactShapley, MatchesOrderingOracle)
{
   Rng rng(11);
   for(std::size_t n = 1; n <= 6; ++n) {
      for(int rep = 0; rep < 10; ++rep) {
         const auto g = oracle::random_game(n, rng);
         const auto phi = exact_shapley(g).values;
         const auto ref = oracle::ordering_shapley(g);
         for(std::size_t i = 0; i < n; ++i) {
            EXPECT_NEAR(phi[i], ref[i], 1e-9);
         }
      }
   }
}

TEST(ExactShapley, EvaluatesEveryCoalitionOnce)
{
   Rng rng(3);
   const auto g = oracle::random_game(7, rng);
   std::map< std::uint64_t, int > seen;
   FunctionGame counting(7, [&](const Coalition& s) {
      ++seen[s.bits()];
      return g(s);
   });
   const auto res = exact_shapley(counting);
   EXPECT_EQ(res.evaluations, 128u);
   EXPECT_EQ(seen.size(), 128u);
   for(const auto& [bits, count] : seen) {
      EXPECT_EQ(count, 1) << bits;
   }
}

TEST(ExactShapley, RefusesAboveCap)
{
   FunctionGame g(13, [](const Coalition&) { return 0.; });
   EXPECT_THROW((void)exact_shapley(g), SizeError);
   FunctionGame small(4, [](const Coalition&) { return 0.; });
   EXPECT_THROW((void)exact_shapley(small, 3), SizeError);
}

TEST(ExactShapley, AdditiveGameReturnsWeights)
{
   Rng rng(5);
   std::vector< double > w;
   const auto g = oracle::dyadic_additive_game(6, rng, &w);
   EXPECT_EQ(exact_shapley(g).values, w);
}

TEST(MarginalContribution, DefinitionAndPrecondition)
{
   const auto g = glove_game();
   EXPECT_DOUBLE_EQ(marginal_contribution(g, 2, Coalition::full(3)), 1.);
   EXPECT_DOUBLE_EQ(marginal_contribution(g, 0, Coalition::full(3)), 0.);
   EXPECT_THROW((void)marginal_contribution(g, 0, Coalition::singleton(3, 1)), PreconditionError);
   EXPECT_THROW((void)marginal_contribution(g, 5, Coalition::full(3)), IndexError);
}

TEST(AxiomProperties, RandomGamesSatisfyAllAxioms)
{
   Rng rng(2024);
   for(int rep = 0; rep < 60; ++rep) {
      const std::size_t n = 2 + static_cast< std::size_t >(rep % 7);
      const auto v = oracle::random_game(n, rng);
      const auto w = oracle::random_game(n, rng);
      const auto r = verify_axioms(v, w, 1e-9);
      EXPECT_TRUE(r.efficiency.passed) << r.efficiency.error;
      EXPECT_TRUE(r.linearity.passed) << r.linearity.max_error;
      EXPECT_TRUE(r.all_passed());
   }
}

TEST(AxiomProperties, SymmetryWitness)
{
   // players 1 and 3 interchangeable by construction
   Rng rng(8);
   auto base = oracle::random_game(4, rng);
   auto t = base.values();
   for(std::uint64_t m = 0; m < 16; ++m) {
      if(((m >> 1) & 1U) && ! ((m >> 3) & 1U)) {
         t[m ^ 0b1010] = t[m];
      }
   }
   const TableGame v(4, t);
   const auto r = verify_axioms(v, v);
   ASSERT_EQ(r.symmetry.pairs.size(), 1u);
   EXPECT_EQ(r.symmetry.pairs[0], (std::pair< std::size_t, std::size_t >(1, 3)));
   EXPECT_TRUE(r.symmetry.passed);
   const auto phi = exact_shapley(v).values;
   EXPECT_NEAR(phi[1], phi[3], 1e-12);
}

TEST(AxiomProperties, NullityWitness)
{
   Rng rng(9);
   const auto inner = oracle::random_game(4, rng);
   // player 4 never changes the value
   FunctionGame v(5, [&](const Coalition& s) { return inner(Coalition(4, s.bits() & 0b1111)); });
   const auto r = verify_axioms(v, v);
   ASSERT_EQ(r.nullity.null_players, (std::vector< std::size_t >{4}));
   EXPECT_TRUE(r.nullity.passed);
   EXPECT_NEAR(exact_shapley(v).values[4], 0., 1e-12);
}

TEST(AxiomProperties, CoherencyWitness)
{
   Rng rng(10);
   const auto w = oracle::random_game(4, rng);
   // v adds a non-negative bonus to player 0's every marginal
   FunctionGame v(4, [&](const Coalition& s) { return w(s) + (s.contains(0) ? 0.5 : 0.); });
   const auto r = verify_axioms(v, w);
   EXPECT_TRUE(r.coherency.passed);
   bool found = false;
   for(const auto& [i, v_dominates] : r.coherency.dominated) {
      found = found || (i == 0 && v_dominates);
   }
   EXPECT_TRUE(found);
   EXPECT_GE(exact_shapley(v).values[0], exact_shapley(w).values[0]);
}

TEST(SubsetSampler, SizeIsUniformAndSubsetUniformGivenSize)
{
   Rng rng(77);
   constexpr std::size_t n = 5;
   constexpr int draws = 200000;
   std::map< std::uint64_t, int > counts;
   std::vector< int > by_size(n + 1, 0);
   for(int d = 0; d < draws; ++d) {
      const auto s = sample_subset_containing(2, n, rng);
      ASSERT_TRUE(s.contains(2));
      ++counts[s.bits()];
      ++by_size[s.size()];
   }
   for(std::size_t k = 1; k <= n; ++k) {
      EXPECT_NEAR(by_size[k] / double(draws), 1. / n, 0.006) << "size " << k;
   }
   // P(S) = 1/n * 1/C(n-1, |S|-1)
   auto choose = [](std::size_t a, std::size_t b) {
      double r = 1.;
      for(std::size_t j = 1; j <= b; ++j) {
         r = r * double(a - b + j) / double(j);
      }
      return r;
   };
   for(const auto& [bits, c] : counts) {
      const Coalition s(n, bits);
      const double p = 1. / n / choose(n - 1, s.size() - 1);
      const double sd = std::sqrt(p * (1 - p) / draws);
      EXPECT_NEAR(c / double(draws), p, 5 * sd) << s.to_string();
   }
   EXPECT_EQ(counts.size(), 16u);
}

TEST(MonteCarloShapley, RejectsNonPositiveSamples)
{
   Rng rng(1);
   const auto g = glove_game();
   EXPECT_THROW((void)mc_shapley(g, 0, rng), ParameterError);
   EXPECT_THROW((void)mc_shapley(g, -3, rng), ParameterError);
}

TEST(MonteCarloShapley, AdditiveCollapseIsBitIdentical)
{
   Rng game_rng(4);
   for(std::size_t n = 1; n <= 8; ++n) {
      const auto g = oracle::dyadic_additive_game(n, game_rng);
      const auto exact = exact_shapley(g).values;
      for(std::int64_t m : {1, 2, 5, 17}) {
         for(std::uint64_t seed = 0; seed < 5; ++seed) {
            Rng rng(seed);
            EXPECT_EQ(mc_shapley(g, m, rng).values, exact) << "n=" << n << " M=" << m;
         }
      }
   }
}

TEST(MonteCarloShapley, BudgetAndMemoization)
{
   Rng rng(6);
   for(std::size_t n = 2; n <= 10; ++n) {
      const auto g = oracle::random_game(std::min< std::size_t >(n, 10), rng);
      std::size_t calls = 0;
      FunctionGame counting(n, [&](const Coalition& s) {
         ++calls;
         return g(s);
      });
      for(std::int64_t m : {1, 5, 10}) {
         calls = 0;
         const auto r = mc_shapley(counting, m, rng);
         EXPECT_EQ(r.evaluations, calls);
         EXPECT_LE(calls, static_cast< std::size_t >(2 * m) * n);
         EXPECT_EQ(r.lookups, static_cast< std::size_t >(2 * m) * n);
         EXPECT_EQ(r.samples, static_cast< std::size_t >(m));
      }
   }
}

TEST(MonteCarloShapley, DeterministicGivenSeed)
{
   Rng grng(2);
   const auto g = oracle::random_game(6, grng);
   Rng a(99), b(99);
   EXPECT_EQ(mc_shapley(g, 7, a).values, mc_shapley(g, 7, b).values);
}

TEST(MonteCarloShapley, ConvergesToExact)
{
   Rng grng(12);
   const auto g = oracle::random_game(6, grng);
   const auto exact = exact_shapley(g).values;
   Rng rng(13);
   const auto est = mc_shapley(g, 20000, rng).values;
   for(std::size_t i = 0; i < 6; ++i) {
      EXPECT_NEAR(est[i], exact[i], 0.03);
   }
}

TEST(MonteCarloShapley, SinglePlayerIsExact)
{
   FunctionGame g(1, [](const Coalition& s) { return s.is_empty() ? 0. : 2.5; });
   Rng rng(0);
   EXPECT_EQ(mc_shapley(g, 3, rng).values, (std::vector< double >{2.5}));
}
