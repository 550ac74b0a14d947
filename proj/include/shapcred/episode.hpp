#ifndef SHAPCRED_EPISODE_HPP
#define SHAPCRED_EPISODE_HPP

#include <cstddef>
#include <deque>
#include <numeric>
#include <random>
#include <vector>

#include "shapcred/agent_net.hpp"
#include "shapcred/errors.hpp"
#include "shapcred/rng.hpp"

namespace shapcred {

struct EpisodeStep {
   std::vector< std::vector< double > > observations;
   std::vector< std::vector< double > > state_observations;
   /// each agent's recurrent state before consuming this step's observation
   std::vector< HiddenState > hidden;
   std::vector< std::size_t > actions;
   double reward = 0.;
   bool done = false;
};

/// One recorded trajectory; exactly the last step carries done = true.
struct Episode {
   std::vector< EpisodeStep > steps;
   bool success = false;

   [[nodiscard]] std::size_t length() const noexcept { return steps.size(); }
   [[nodiscard]] double total_return() const
   {
      return std::accumulate(steps.begin(), steps.end(), 0., [](double acc, const EpisodeStep& s) {
         return acc + s.reward;
      });
   }
};

/// FIFO ring of the most recent `capacity` episodes.
class ReplayBuffer {
  public:
   explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity)
   {
      if(capacity == 0) {
         throw ParameterError("ReplayBuffer: capacity must be positive");
      }
   }

   void push(Episode ep)
   {
      if(episodes_.size() == capacity_) {
         episodes_.pop_front();
      }
      episodes_.push_back(std::move(ep));
   }

   [[nodiscard]] std::size_t size() const noexcept { return episodes_.size(); }
   [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
   [[nodiscard]] bool empty() const noexcept { return episodes_.empty(); }
   /// oldest first
   [[nodiscard]] const Episode& operator[](std::size_t i) const { return episodes_.at(i); }

   /// `count` distinct episodes chosen uniformly; the whole buffer (in
   /// insertion order) when it holds no more than `count`.
   [[nodiscard]] std::vector< const Episode* > sample(std::size_t count, Rng& rng) const
   {
      if(count == 0) {
         throw ParameterError("ReplayBuffer::sample: batch size must be positive");
      }
      std::vector< std::size_t > idx(episodes_.size());
      std::iota(idx.begin(), idx.end(), 0);
      if(idx.size() > count) {
         for(std::size_t p = 0; p < count; ++p) {
            std::uniform_int_distribution< std::size_t > pick(p, idx.size() - 1);
            std::swap(idx[p], idx[pick(rng)]);
         }
         idx.resize(count);
      }
      std::vector< const Episode* > out;
      out.reserve(idx.size());
      for(auto i : idx) {
         out.push_back(&episodes_[i]);
      }
      return out;
   }

  private:
   std::size_t capacity_;
   std::deque< Episode > episodes_;
};

}  // namespace shapcred

#endif  // SHAPCRED_EPISODE_HPP
