#ifndef SHAPCRED_ENVS_TEAM_GRIDWORLD_HPP
#define SHAPCRED_ENVS_TEAM_GRIDWORLD_HPP

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "shapcred/dec_pomdp.hpp"

namespace shapcred {

struct Cell {
   int x = 0;
   int y = 0;
   friend bool operator==(const Cell&, const Cell&) = default;
};

struct GridworldParams {
   int width = 5;
   int height = 5;
   std::size_t n_agents = 3;
   std::vector< Cell > targets;
   /// fixed start cells; empty means uniformly random distinct non-target cells
   std::vector< Cell > starts;
   int sight = 1;
   std::size_t episode_limit = 30;
   double step_penalty = 0.;

   friend bool operator==(const GridworldParams&, const GridworldParams&) = default;
};

/// Cooperative gridworld: the team earns +1 on every step at which all target
/// cells are occupied simultaneously (one agent per target suffices; agents may
/// share cells). Moves into the boundary leave the agent in place.
///
/// Actions: 0 no-op, 1 up (y-1), 2 down (y+1), 3 left (x-1), 4 right (x+1).
///
/// Partial observation per agent: a (2*sight+1)^2 window with three channels
/// (out-of-grid, target, other-agent count / (n-1)) followed by the agent's
/// normalized position. Unrestricted observation: normalized position,
/// on-target flag, and elapsed time t / episode_limit.
class TeamGridworld final : public Environment {
  public:
   static constexpr std::size_t n_actions = 5;

   explicit TeamGridworld(GridworldParams p) : p_(std::move(p))
   {
      if(p_.width < 1 || p_.height < 1) {
         throw ValidationError("TeamGridworld: width and height must be positive");
      }
      if(p_.targets.empty()) {
         throw ValidationError("TeamGridworld: at least one target cell is required");
      }
      if(p_.targets.size() > p_.n_agents) {
         throw ValidationError("TeamGridworld: more targets than agents can never be fully occupied");
      }
      for(const auto& c : p_.targets) {
         check_cell(c, "target");
      }
      if(! p_.starts.empty() && p_.starts.size() != p_.n_agents) {
         throw ValidationError("TeamGridworld: starts must list one cell per agent");
      }
      for(const auto& c : p_.starts) {
         check_cell(c, "start");
      }
      if(p_.starts.empty()
         && static_cast< std::size_t >(p_.width * p_.height) < p_.n_agents + p_.targets.size()) {
         throw ValidationError("TeamGridworld: grid too small for random distinct starts");
      }
      if(p_.sight < 0) {
         throw ValidationError("TeamGridworld: sight must be non-negative");
      }
      const auto side = static_cast< std::size_t >(2 * p_.sight + 1);
      spec_.n_agents = p_.n_agents;
      spec_.action_space_size = n_actions;
      spec_.obs_dim = 3 * side * side + 2;
      spec_.state_obs_dim = 4;
      spec_.episode_limit = p_.episode_limit;
      spec_.groups.assign(p_.n_agents, "walker");
      spec_.noop_action = 0;
      spec_.validate();
      pos_.assign(p_.n_agents, Cell{});
   }

   [[nodiscard]] const DecPomdpSpec& spec() const override { return spec_; }
   [[nodiscard]] std::unique_ptr< Environment > clone() const override
   {
      return std::make_unique< TeamGridworld >(*this);
   }
   [[nodiscard]] std::string name() const override { return "team_gridworld"; }
   [[nodiscard]] const GridworldParams& params() const noexcept { return p_; }
   [[nodiscard]] const std::vector< Cell >& positions() const noexcept { return pos_; }

   [[nodiscard]] bool episode_success() const override { return achieved_; }

   /// With fixed starts: every step from the earliest possible full-occupancy
   /// step to the limit is rewarded, minus the step penalty on every step.
   [[nodiscard]] double optimal_return() const override
   {
      if(p_.starts.empty()) {
         return Environment::optimal_return();
      }
      const auto makespan = static_cast< std::size_t >(std::max(1, min_makespan()));
      const auto limit = p_.episode_limit;
      const double hits = makespan <= limit ? static_cast< double >(limit - makespan + 1) : 0.;
      return hits - p_.step_penalty * static_cast< double >(limit);
   }

   /// Fewest moves after which all targets can be occupied simultaneously,
   /// by brute force over agent-to-target assignments.
   [[nodiscard]] int min_makespan() const
   {
      const auto& starts = p_.starts.empty() ? pos_ : p_.starts;
      std::vector< std::size_t > perm(p_.n_agents);
      std::iota(perm.begin(), perm.end(), 0);
      int best = -1;
      do {
         int span = 0;
         for(std::size_t t = 0; t < p_.targets.size(); ++t) {
            const auto& a = starts[perm[t]];
            const auto& g = p_.targets[t];
            span = std::max(span, std::abs(a.x - g.x) + std::abs(a.y - g.y));
         }
         best = best < 0 ? span : std::min(best, span);
      } while(std::next_permutation(perm.begin(), perm.end()));
      return best;
   }

  protected:
   StepResult do_reset(Rng& rng) override
   {
      achieved_ = false;
      if(! p_.starts.empty()) {
         pos_ = p_.starts;
      } else {
         std::vector< Cell > free;
         for(int y = 0; y < p_.height; ++y) {
            for(int x = 0; x < p_.width; ++x) {
               if(! is_target({x, y})) {
                  free.push_back({x, y});
               }
            }
         }
         for(std::size_t i = 0; i < p_.n_agents; ++i) {
            std::uniform_int_distribution< std::size_t > pick(i, free.size() - 1);
            std::swap(free[i], free[pick(rng)]);
            pos_[i] = free[i];
         }
      }
      return observe(0);
   }

   StepResult do_step(const JointAction& a) override
   {
      for(std::size_t i = 0; i < p_.n_agents; ++i) {
         Cell next = pos_[i];
         switch(a.actions[i]) {
            case 1: --next.y; break;
            case 2: ++next.y; break;
            case 3: --next.x; break;
            case 4: ++next.x; break;
            default: break;
         }
         if(inside(next)) {
            pos_[i] = next;
         }
      }
      auto res = observe(time_step());
      double r = 0.;
      if(all_targets_occupied()) {
         r += 1.;
         achieved_ = true;
      }
      res.reward = r - p_.step_penalty;
      return res;
   }

  private:
   void check_cell(const Cell& c, const char* what) const
   {
      if(! inside(c)) {
         throw ValidationError(std::string("TeamGridworld: ") + what + " cell outside the grid");
      }
   }
   [[nodiscard]] bool inside(const Cell& c) const
   {
      return c.x >= 0 && c.y >= 0 && c.x < p_.width && c.y < p_.height;
   }
   [[nodiscard]] bool is_target(const Cell& c) const
   {
      return std::find(p_.targets.begin(), p_.targets.end(), c) != p_.targets.end();
   }
   [[nodiscard]] bool all_targets_occupied() const
   {
      return std::all_of(p_.targets.begin(), p_.targets.end(), [&](const Cell& t) {
         return std::find(pos_.begin(), pos_.end(), t) != pos_.end();
      });
   }

   [[nodiscard]] StepResult observe(std::size_t t) const
   {
      StepResult r;
      const double xmax = std::max(1, p_.width - 1);
      const double ymax = std::max(1, p_.height - 1);
      const double others_max = std::max< double >(1., static_cast< double >(p_.n_agents) - 1.);
      const int side = 2 * p_.sight + 1;
      const auto cells = static_cast< std::size_t >(side * side);
      for(std::size_t i = 0; i < p_.n_agents; ++i) {
         std::vector< double > o(spec_.obs_dim, 0.);
         std::size_t k = 0;
         for(int dy = -p_.sight; dy <= p_.sight; ++dy) {
            for(int dx = -p_.sight; dx <= p_.sight; ++dx, ++k) {
               const Cell c{pos_[i].x + dx, pos_[i].y + dy};
               if(! inside(c)) {
                  o[k] = 1.;
                  continue;
               }
               o[cells + k] = is_target(c) ? 1. : 0.;
               double count = 0.;
               for(std::size_t j = 0; j < p_.n_agents; ++j) {
                  if(j != i && pos_[j] == c) {
                     count += 1.;
                  }
               }
               o[2 * cells + k] = count / others_max;
            }
         }
         o[3 * cells] = pos_[i].x / xmax;
         o[3 * cells + 1] = pos_[i].y / ymax;
         r.observations.push_back(std::move(o));

         r.state_observations.push_back({pos_[i].x / xmax, pos_[i].y / ymax, is_target(pos_[i]) ? 1. : 0.,
                                         static_cast< double >(t) / static_cast< double >(p_.episode_limit)});
      }
      return r;
   }

   GridworldParams p_;
   DecPomdpSpec spec_;
   std::vector< Cell > pos_;
   bool achieved_ = false;
};

}  // namespace shapcred

#endif  // SHAPCRED_ENVS_TEAM_GRIDWORLD_HPP
