#ifndef SHAPCRED_COALITION_GAME_HPP
#define SHAPCRED_COALITION_GAME_HPP

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "shapcred/coalition.hpp"
#include "shapcred/errors.hpp"

namespace shapcred {

/// Default upper bound on the player count accepted by exhaustive enumeration.
inline constexpr std::size_t default_exact_cap = 12;

/// A cooperative game in characteristic-function form: a deterministic map
/// from coalitions of `n()` players to reals, defined on the empty set.
template < typename G >
concept CharacteristicFn = requires(const G& g, const Coalition& s) {
   { g.n() } -> std::convertible_to< std::size_t >;
   { g(s) } -> std::convertible_to< double >;
};

/// Type-erased characteristic function.
class FunctionGame {
  public:
   FunctionGame(std::size_t n, std::function< double(const Coalition&) > fn)
       : n_(n), fn_(std::move(fn))
   {
      if(n == 0 || n > Coalition::max_players) {
         throw ParameterError("FunctionGame: player count must be in [1, 64]");
      }
   }
   [[nodiscard]] std::size_t n() const noexcept { return n_; }
   double operator()(const Coalition& s) const { return fn_(s); }

  private:
   std::size_t n_;
   std::function< double(const Coalition&) > fn_;
};

/// A game stored as an explicit table of 2^n values indexed by coalition bits.
class TableGame {
  public:
   explicit TableGame(std::size_t n, std::vector< double > values) : n_(n), values_(std::move(values))
   {
      if(n == 0 || n > 24) {
         throw ParameterError("TableGame: player count must be in [1, 24]");
      }
      if(values_.size() != (std::size_t{1} << n)) {
         throw ShapeError("TableGame: expected 2^n values");
      }
   }
   template < CharacteristicFn G >
   static TableGame tabulate(const G& g)
   {
      const std::size_t n = g.n();
      std::vector< double > vals(std::size_t{1} << n);
      for(std::uint64_t m = 0; m < vals.size(); ++m) {
         vals[m] = g(Coalition(n, m));
      }
      return TableGame(n, std::move(vals));
   }
   [[nodiscard]] std::size_t n() const noexcept { return n_; }
   double operator()(const Coalition& s) const { return values_[s.bits()]; }
   [[nodiscard]] const std::vector< double >& values() const noexcept { return values_; }
   double& at(std::uint64_t bits) { return values_.at(bits); }

  private:
   std::size_t n_;
   std::vector< double > values_;
};

enum class ShapleyMethod { exact, monte_carlo };

struct ShapleyResult {
   std::vector< double > values;
   ShapleyMethod method = ShapleyMethod::exact;
   /// number of Monte Carlo samples per player; 0 for exact
   std::size_t samples = 0;
   /// characteristic-function calls actually made (after memoization)
   std::size_t evaluations = 0;
   /// characteristic values the defining sum refers to, before memoization
   /// (two per marginal contribution)
   std::size_t lookups = 0;
};

namespace detail {

inline void check_player(std::size_t i, std::size_t n)
{
   if(i >= n) {
      throw IndexError("player index " + std::to_string(i) + " out of range for n=" + std::to_string(n));
   }
}

/// Running mean that stays bit-exact when every sample is identical.
class RunningMean {
  public:
   void add(double x)
   {
      ++count_;
      mean_ += (x - mean_) / static_cast< double >(count_);
   }
   [[nodiscard]] double value() const noexcept { return mean_; }
   [[nodiscard]] std::size_t count() const noexcept { return count_; }

  private:
   double mean_ = 0.;
   std::size_t count_ = 0;
};

/// Memoizing wrapper keyed by coalition bits; counts distinct evaluations.
template < CharacteristicFn G >
class MemoGame {
  public:
   explicit MemoGame(const G& g) : g_(g) {}
   double operator()(const Coalition& s)
   {
      auto [it, inserted] = cache_.try_emplace(s.bits(), 0.);
      if(inserted) {
         it->second = static_cast< double >(g_(s));
      }
      return it->second;
   }
   [[nodiscard]] std::size_t evaluations() const noexcept { return cache_.size(); }

  private:
   const G& g_;
   std::unordered_map< std::uint64_t, double > cache_;
};

}  // namespace detail

/// v(S) - v(S \ {i}).
template < CharacteristicFn G >
double marginal_contribution(const G& v, std::size_t i, const Coalition& s)
{
   const std::size_t n = v.n();
   detail::check_player(i, n);
   if(s.n() != n) {
      throw ShapeError("marginal_contribution: coalition is over a different player count");
   }
   if(! s.contains(i)) {
      throw PreconditionError(
         "marginal_contribution: player " + std::to_string(i) + " not in coalition " + s.to_string());
   }
   return static_cast< double >(v(s)) - static_cast< double >(v(s.without(i)));
}

/// Exact Shapley value by exhaustive enumeration of every coalition containing
/// each player, weighted per coalition size. Each of the 2^n coalitions is
/// evaluated exactly once.
template < CharacteristicFn G >
ShapleyResult exact_shapley(const G& v, std::size_t cap = default_exact_cap)
{
   const std::size_t n = v.n();
   if(n > cap) {
      throw SizeError(
         "exact_shapley: n=" + std::to_string(n) + " exceeds the exact cap " + std::to_string(cap)
         + "; use mc_shapley");
   }
   const std::uint64_t count = std::uint64_t{1} << n;
   std::vector< double > table(count);
   for(std::uint64_t m = 0; m < count; ++m) {
      table[m] = static_cast< double >(v(Coalition(n, m)));
   }

   ShapleyResult res;
   res.method = ShapleyMethod::exact;
   res.evaluations = static_cast< std::size_t >(count);
   res.values.assign(n, 0.);
   for(std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      // mean marginal per coalition size, then mean over sizes
      std::vector< detail::RunningMean > by_size(n + 1);
      for(std::uint64_t m = 0; m < count; ++m) {
         if((m & bit) == 0) {
            continue;
         }
         by_size[static_cast< std::size_t >(std::popcount(m))].add(table[m] - table[m & ~bit]);
         res.lookups += 2;
      }
      detail::RunningMean overall;
      for(std::size_t k = 1; k <= n; ++k) {
         overall.add(by_size[k].value());
      }
      res.values[i] = overall.value();
   }
   return res;
}

/// Draws a coalition containing `i`: the size k is uniform on {1..n}, then the
/// k-1 companions are a uniformly random subset of the other players.
template < std::uniform_random_bit_generator Rng >
Coalition sample_subset_containing(std::size_t i, std::size_t n, Rng& rng)
{
   if(n == 0 || n > Coalition::max_players) {
      throw ParameterError("sample_subset_containing: player count must be in [1, 64]");
   }
   detail::check_player(i, n);
   std::uniform_int_distribution< std::size_t > size_dist(1, n);
   const std::size_t k = size_dist(rng);

   std::vector< std::size_t > others;
   others.reserve(n - 1);
   for(std::size_t j = 0; j < n; ++j) {
      if(j != i) {
         others.push_back(j);
      }
   }
   std::uint64_t bits = std::uint64_t{1} << i;
   // partial Fisher-Yates: the first k-1 slots of a uniform permutation
   for(std::size_t p = 0; p + 1 < k; ++p) {
      std::uniform_int_distribution< std::size_t > pick(p, others.size() - 1);
      std::swap(others[p], others[pick(rng)]);
      bits |= std::uint64_t{1} << others[p];
   }
   return Coalition(n, bits);
}

/// Monte Carlo Shapley estimate: for each player, the mean of M marginal
/// contributions over independently sampled coalitions containing it.
/// Players are processed in index order, samples drawn fresh per player.
template < CharacteristicFn G, std::uniform_random_bit_generator Rng >
ShapleyResult mc_shapley(const G& v, std::int64_t samples, Rng& rng)
{
   if(samples <= 0) {
      throw ParameterError("mc_shapley: sample count M must be >= 1, got " + std::to_string(samples));
   }
   const std::size_t n = v.n();
   const auto m_count = static_cast< std::size_t >(samples);
   detail::MemoGame< G > memo(v);
   ShapleyResult res;
   res.method = ShapleyMethod::monte_carlo;
   res.samples = m_count;
   res.values.assign(n, 0.);
   for(std::size_t i = 0; i < n; ++i) {
      detail::RunningMean mean;
      for(std::size_t j = 0; j < m_count; ++j) {
         const Coalition s = sample_subset_containing(i, n, rng);
         mean.add(memo(s) - memo(s.without(i)));
         res.lookups += 2;
      }
      res.values[i] = mean.value();
   }
   res.evaluations = memo.evaluations();
   return res;
}

// ---------------------------------------------------------------------------
// Axiom verification
// ---------------------------------------------------------------------------

struct AxiomReport {
   struct Efficiency {
      bool passed = false;
      double error = 0.;
   } efficiency;
   struct Symmetry {
      bool passed = true;
      std::vector< std::pair< std::size_t, std::size_t > > pairs;
      double max_error = 0.;
   } symmetry;
   struct Nullity {
      bool passed = true;
      std::vector< std::size_t > null_players;
      double max_error = 0.;
   } nullity;
   struct Linearity {
      bool passed = false;
      double max_error = 0.;
   } linearity;
   struct Coherency {
      bool passed = true;
      /// (i, v_dominates_w): the marginal tables of v and w are ordered for player i
      std::vector< std::pair< std::size_t, bool > > dominated;
   } coherency;

   [[nodiscard]] bool all_passed() const noexcept
   {
      return efficiency.passed && symmetry.passed && nullity.passed && linearity.passed
             && coherency.passed;
   }
};

namespace detail {

inline double max_abs(const std::vector< double >& t)
{
   double m = 0.;
   for(double x : t) {
      m = std::max(m, std::abs(x));
   }
   return m;
}

}  // namespace detail

/// Checks the five Shapley axioms for `exact_shapley` on v (and on the pair
/// v, w for linearity and coherency). Interchangeable and null players are
/// detected by exhaustive comparison of marginals within `tol`.
template < CharacteristicFn V, CharacteristicFn W >
AxiomReport verify_axioms(const V& v, const W& w, double tol = 1e-9, std::size_t cap = default_exact_cap)
{
   const std::size_t n = v.n();
   if(w.n() != n) {
      throw ShapeError("verify_axioms: games have different player counts");
   }
   if(n > cap) {
      throw SizeError("verify_axioms: n=" + std::to_string(n) + " exceeds the exact cap");
   }
   const TableGame tv = TableGame::tabulate(v);
   const TableGame tw = TableGame::tabulate(w);
   const auto& a = tv.values();
   const auto& b = tw.values();
   std::vector< double > sum(a.size());
   for(std::size_t m = 0; m < a.size(); ++m) {
      sum[m] = a[m] + b[m];
   }
   const TableGame tsum(n, sum);

   const auto phi_v = exact_shapley(tv, cap).values;
   const auto phi_w = exact_shapley(tw, cap).values;
   const auto phi_sum = exact_shapley(tsum, cap).values;
   const std::uint64_t full = Coalition::universe_mask(n);
   // comparisons of Shapley values scale with the magnitude of the game
   const double vtol = tol * (1. + detail::max_abs(a));

   AxiomReport rep;

   // efficiency
   const double total = std::accumulate(phi_v.begin(), phi_v.end(), 0.);
   rep.efficiency.error = std::abs(total - (a[full] - a[0]));
   rep.efficiency.passed = rep.efficiency.error <= tol * (1. + std::abs(a[full]));

   // symmetry: i, j interchangeable iff v(S+i) == v(S+j) for all S without i, j
   for(std::size_t i = 0; i < n; ++i) {
      for(std::size_t j = i + 1; j < n; ++j) {
         const std::uint64_t bi = std::uint64_t{1} << i;
         const std::uint64_t bj = std::uint64_t{1} << j;
         bool interchangeable = true;
         for(std::uint64_t m = 0; m <= full && interchangeable; ++m) {
            if((m & (bi | bj)) != 0) {
               continue;
            }
            interchangeable = std::abs(a[m | bi] - a[m | bj]) <= tol;
         }
         if(interchangeable) {
            rep.symmetry.pairs.emplace_back(i, j);
            const double err = std::abs(phi_v[i] - phi_v[j]);
            rep.symmetry.max_error = std::max(rep.symmetry.max_error, err);
            rep.symmetry.passed = rep.symmetry.passed && err <= vtol;
         }
      }
   }

   // nullity
   for(std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bi = std::uint64_t{1} << i;
      bool is_null = true;
      for(std::uint64_t m = 0; m <= full && is_null; ++m) {
         if((m & bi) != 0) {
            is_null = std::abs(a[m] - a[m & ~bi]) <= tol;
         }
      }
      if(is_null) {
         rep.nullity.null_players.push_back(i);
         const double err = std::abs(phi_v[i]);
         rep.nullity.max_error = std::max(rep.nullity.max_error, err);
         rep.nullity.passed = rep.nullity.passed && err <= vtol;
      }
   }

   // linearity
   for(std::size_t i = 0; i < n; ++i) {
      rep.linearity.max_error
         = std::max(rep.linearity.max_error, std::abs(phi_sum[i] - (phi_v[i] + phi_w[i])));
   }
   rep.linearity.passed
      = rep.linearity.max_error <= tol * (1. + detail::max_abs(a) + detail::max_abs(b));

   // coherency, checked in whichever direction the marginal tables are ordered
   const double ctol = tol * (1. + std::max(detail::max_abs(a), detail::max_abs(b)));
   for(std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bi = std::uint64_t{1} << i;
      bool v_ge_w = true;
      bool w_ge_v = true;
      for(std::uint64_t m = 0; m <= full; ++m) {
         if((m & bi) == 0) {
            continue;
         }
         const double dv = a[m] - a[m & ~bi];
         const double dw = b[m] - b[m & ~bi];
         v_ge_w = v_ge_w && dv >= dw - tol;
         w_ge_v = w_ge_v && dw >= dv - tol;
      }
      if(v_ge_w) {
         rep.coherency.dominated.emplace_back(i, true);
         rep.coherency.passed = rep.coherency.passed && phi_v[i] >= phi_w[i] - ctol;
      }
      if(w_ge_v) {
         rep.coherency.dominated.emplace_back(i, false);
         rep.coherency.passed = rep.coherency.passed && phi_w[i] >= phi_v[i] - ctol;
      }
   }
   return rep;
}

}  // namespace shapcred

#endif  // SHAPCRED_COALITION_GAME_HPP
