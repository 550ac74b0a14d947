#ifndef SHAPCRED_AUDIT_HPP
#define SHAPCRED_AUDIT_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "shapcred/agent_net.hpp"
#include "shapcred/coalition.hpp"
#include "shapcred/credit.hpp"
#include "shapcred/critic_net.hpp"
#include "shapcred/dec_pomdp.hpp"
#include "shapcred/errors.hpp"
#include "shapcred/rng.hpp"
#include "shapcred/trainer.hpp"

namespace shapcred {

/// Ranks with ties sharing their average rank (1-based).
inline std::vector< double > average_ranks(const std::vector< double >& x)
{
   std::vector< std::size_t > order(x.size());
   std::iota(order.begin(), order.end(), 0);
   std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
   std::vector< double > r(x.size());
   for(std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while(j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) {
         ++j;
      }
      const double avg = 0.5 * static_cast< double >(i + j) + 1.;
      for(std::size_t k = i; k <= j; ++k) {
         r[order[k]] = avg;
      }
      i = j + 1;
   }
   return r;
}

/// Spearman rank correlation; NaN when either side is constant.
inline double spearman(const std::vector< double >& a, const std::vector< double >& b)
{
   if(a.size() != b.size()) {
      throw ShapeError("spearman: length mismatch");
   }
   const auto ra = average_ranks(a);
   const auto rb = average_ranks(b);
   const double n = static_cast< double >(a.size());
   const double ma = std::accumulate(ra.begin(), ra.end(), 0.) / n;
   const double mb = std::accumulate(rb.begin(), rb.end(), 0.) / n;
   double sab = 0., saa = 0., sbb = 0.;
   for(std::size_t i = 0; i < ra.size(); ++i) {
      sab += (ra[i] - ma) * (rb[i] - mb);
      saa += (ra[i] - ma) * (ra[i] - ma);
      sbb += (rb[i] - mb) * (rb[i] - mb);
   }
   if(saa == 0. || sbb == 0.) {
      return std::numeric_limits< double >::quiet_NaN();
   }
   return sab / std::sqrt(saa * sbb);
}

struct AuditStep {
   std::size_t episode = 0;
   std::size_t t = 0;
   /// f(H_A) and f with every action masked
   double grand = 0.;
   double all_masked = 0.;
   /// empty when the exact column is unavailable
   std::vector< double > exact;
   std::size_t exact_evaluations = 0;
   /// one credit vector per requested M
   std::vector< std::vector< double > > mc;
   std::vector< std::size_t > mc_evaluations;
   std::vector< double > plain_cf;
   std::vector< double > uniform;
};

struct AuditColumnStats {
   std::size_t m = 0;
   /// mean over steps of the per-agent mean |mc - exact|
   double mae = std::numeric_limits< double >::quiet_NaN();
   /// mean Spearman correlation with exact over steps where it is defined
   double spearman = std::numeric_limits< double >::quiet_NaN();
   std::size_t spearman_steps = 0;
   std::size_t max_evaluations = 0;
   /// 2 M n + 1
   std::size_t evaluation_bound = 0;
};

struct AuditResult {
   std::size_t n_agents = 0;
   bool exact_available = false;
   std::vector< std::size_t > ms;
   std::vector< AuditStep > steps;
   std::vector< AuditColumnStats > columns;
   /// max over steps of |sum exact - (grand - all_masked)| / (1 + |grand|)
   double max_efficiency_residual = std::numeric_limits< double >::quiet_NaN();
   /// per agent, mean over steps of |exact credit|
   std::vector< double > mean_abs_exact;
};

/// Rolls the agents out greedily for `steps` environment steps and, at each
/// step, computes credits from `critic` under exact Shapley, Monte Carlo
/// Shapley for every M in `ms`, plain counterfactuals and uniform splitting.
inline AuditResult run_audit(const CriticNet& critic,
                             const std::vector< AgentNet >& agents,
                             Environment& env,
                             std::size_t steps,
                             const std::vector< std::size_t >& ms,
                             std::uint64_t seed,
                             std::size_t exact_cap = default_exact_cap)
{
   const auto& sp = env.spec();
   const auto& ca = critic.arch();
   if(agents.size() != sp.n_agents || ca.n_agents != sp.n_agents || ca.obs_dim != sp.state_obs_dim
      || ca.n_actions != sp.action_space_size) {
      throw ShapeError("audit: networks do not match the environment");
   }
   for(const auto& a : agents) {
      if(a.arch().obs_dim != sp.obs_dim || a.arch().n_actions != sp.action_space_size) {
         throw ShapeError("audit: agent network does not match the environment");
      }
   }
   if(steps == 0) {
      throw ParameterError("audit: at least one step required");
   }
   for(auto m : ms) {
      if(m == 0) {
         throw ParameterError("audit: every M must be positive");
      }
   }

   AuditResult res;
   res.n_agents = sp.n_agents;
   res.exact_available = sp.n_agents <= exact_cap;
   res.ms = ms;

   Rng roll_rng(derive_seed(seed, 4));
   Rng mc_rng(derive_seed(seed, 5));
   std::size_t episode = 0;
   while(res.steps.size() < steps) {
      const Episode ep = run_episode(agents, env, 0., roll_rng);
      const Batch b = collate({&ep}, sp);
      const CriticCounterfactuals cf(critic, b.critic_inputs);
      for(std::size_t t = 0; t < b.steps() && res.steps.size() < steps; ++t) {
         const auto game = cf.game(t);
         AuditStep s;
         s.episode = episode;
         s.t = t;
         s.grand = game.grand_value();
         s.all_masked = cf.masked_value(t, Coalition::full(sp.n_agents));
         if(res.exact_available) {
            const auto cv = shapley_credits_exact(game, exact_cap);
            s.exact = cv.credits;
            s.exact_evaluations = cv.critic_evaluations;
         }
         for(auto m : ms) {
            const auto cv = shapley_credits_mc(game, static_cast< std::int64_t >(m), mc_rng);
            s.mc.push_back(cv.credits);
            s.mc_evaluations.push_back(cv.critic_evaluations);
         }
         s.plain_cf = plain_counterfactual_credits(game).credits;
         s.uniform = uniform_credits(game).credits;
         res.steps.push_back(std::move(s));
      }
      ++episode;
   }

   const auto n = static_cast< double >(sp.n_agents);
   for(std::size_t k = 0; k < ms.size(); ++k) {
      AuditColumnStats c;
      c.m = ms[k];
      c.evaluation_bound = 2 * ms[k] * sp.n_agents + 1;
      double mae = 0., rho = 0.;
      for(const auto& s : res.steps) {
         c.max_evaluations = std::max(c.max_evaluations, s.mc_evaluations[k]);
         if(! res.exact_available) {
            continue;
         }
         double e = 0.;
         for(std::size_t i = 0; i < sp.n_agents; ++i) {
            e += std::abs(s.mc[k][i] - s.exact[i]);
         }
         mae += e / n;
         const double r = spearman(s.mc[k], s.exact);
         if(! std::isnan(r)) {
            rho += r;
            ++c.spearman_steps;
         }
      }
      if(res.exact_available) {
         c.mae = mae / static_cast< double >(res.steps.size());
         if(c.spearman_steps > 0) {
            c.spearman = rho / static_cast< double >(c.spearman_steps);
         }
      }
      res.columns.push_back(c);
   }
   if(res.exact_available) {
      res.max_efficiency_residual = 0.;
      res.mean_abs_exact.assign(sp.n_agents, 0.);
      for(const auto& s : res.steps) {
         const double sum = std::accumulate(s.exact.begin(), s.exact.end(), 0.);
         res.max_efficiency_residual =
            std::max(res.max_efficiency_residual, std::abs(sum - (s.grand - s.all_masked)) / (1. + std::abs(s.grand)));
         for(std::size_t i = 0; i < sp.n_agents; ++i) {
            res.mean_abs_exact[i] += std::abs(s.exact[i]) / static_cast< double >(res.steps.size());
         }
      }
   }
   return res;
}

struct BenchRow {
   std::size_t n = 0;
   /// "exact" or "mc"
   std::string method;
   /// 0 for exact
   std::size_t m = 0;
   std::size_t trials = 0;
   /// distinct masked coalitions evaluated, excluding the unmasked call
   std::size_t coalition_evaluations_max = 0;
   double critic_evaluations_mean = 0.;
   std::size_t critic_evaluations_max = 0;
   /// 2^n for exact, 2 M n + 1 for mc
   std::size_t critic_evaluation_bound = 0;
   /// coalition values the estimator's sum refers to without memoization:
   /// n 2^n for exact, 2 M n for mc
   std::size_t lookups_max = 0;
   double wall_us_mean = 0.;
};

/// Times exact and Monte Carlo credits on randomly initialized critics over
/// random inputs, counting critic evaluations per credit vector.
inline std::vector< BenchRow > run_bench(const std::vector< std::size_t >& ns,
                                         const std::vector< std::size_t >& ms,
                                         std::size_t trials,
                                         std::uint64_t seed)
{
   constexpr std::size_t max_exact = 20;
   if(trials == 0) {
      throw ParameterError("bench: at least one trial required");
   }
   std::vector< BenchRow > rows;
   for(auto n : ns) {
      if(n == 0 || n > max_exact) {
         throw ParameterError("bench: n must be in [1, " + std::to_string(max_exact) + "]");
      }
      Rng rng(derive_seed(seed, n));
      CriticArch arch;
      arch.n_agents = n;
      arch.obs_dim = 4;
      arch.n_actions = 5;
      arch.groups.assign(n, "a");
      arch.units = 16;
      arch.head_hidden = 16;
      CriticNet critic(arch);
      critic.init(rng);

      std::vector< Mat > inputs(n, Mat(arch.input_dim(), static_cast< Eigen::Index >(trials)));
      std::uniform_int_distribution< std::size_t > action(0, arch.n_actions - 1);
      for(std::size_t t = 0; t < trials; ++t) {
         for(std::size_t i = 0; i < n; ++i) {
            std::vector< double > obs(arch.obs_dim);
            for(auto& o : obs) {
               o = uniform01(rng);
            }
            inputs[i].col(static_cast< Eigen::Index >(t)) = critic.make_input(obs, one_hot(action(rng), arch.n_actions));
         }
      }
      const CriticCounterfactuals cf(critic, inputs);

      auto measure = [&](BenchRow row, auto&& credits) {
         row.n = n;
         row.trials = trials;
         double total_us = 0.;
         double total_evals = 0.;
         for(std::size_t t = 0; t < trials; ++t) {
            const auto game = cf.game(t);
            const auto start = std::chrono::steady_clock::now();
            const CreditVector cv = credits(game);
            total_us += std::chrono::duration< double, std::micro >(std::chrono::steady_clock::now() - start).count();
            total_evals += static_cast< double >(cv.critic_evaluations);
            row.critic_evaluations_max = std::max(row.critic_evaluations_max, cv.critic_evaluations);
            row.lookups_max = std::max(row.lookups_max, cv.lookups);
         }
         row.coalition_evaluations_max = row.critic_evaluations_max - 1;
         row.critic_evaluations_mean = total_evals / static_cast< double >(trials);
         row.wall_us_mean = total_us / static_cast< double >(trials);
         rows.push_back(row);
      };

      BenchRow exact;
      exact.method = "exact";
      exact.critic_evaluation_bound = std::size_t{1} << n;
      measure(exact, [&](const CounterfactualGame& g) { return shapley_credits_exact(g, max_exact); });
      for(auto m : ms) {
         if(m == 0) {
            throw ParameterError("bench: every M must be positive");
         }
         BenchRow mc;
         mc.method = "mc";
         mc.m = m;
         mc.critic_evaluation_bound = 2 * m * n + 1;
         Rng mc_rng(derive_seed(seed, 100 + m));
         measure(mc, [&](const CounterfactualGame& g) {
            return shapley_credits_mc(g, static_cast< std::int64_t >(m), mc_rng);
         });
      }
   }
   return rows;
}

}  // namespace shapcred

#endif  // SHAPCRED_AUDIT_HPP
