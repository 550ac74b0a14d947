#ifndef SHAPCRED_COALITION_HPP
#define SHAPCRED_COALITION_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "shapcred/errors.hpp"

namespace shapcred {

/// A subset of the players {0, ..., n-1}, stored as a 64-bit mask.
class Coalition {
  public:
   static constexpr std::size_t max_players = 64;

   Coalition() = default;

   explicit Coalition(std::size_t n, std::uint64_t bits = 0) : bits_(bits), n_(n)
   {
      if(n == 0 || n > max_players) {
         throw ParameterError("Coalition: player count must be in [1, 64], got " + std::to_string(n));
      }
      if((bits_ & ~universe_mask(n)) != 0) {
         throw IndexError("Coalition: bit set at or above n=" + std::to_string(n));
      }
   }

   static Coalition empty(std::size_t n) { return Coalition(n, 0); }
   static Coalition full(std::size_t n) { return Coalition(n, universe_mask(n)); }
   static Coalition singleton(std::size_t n, std::size_t i) { return empty(n).with(i); }

   [[nodiscard]] std::uint64_t bits() const noexcept { return bits_; }
   [[nodiscard]] std::size_t n() const noexcept { return n_; }
   [[nodiscard]] std::size_t size() const noexcept
   {
      return static_cast< std::size_t >(std::popcount(bits_));
   }
   [[nodiscard]] bool is_empty() const noexcept { return bits_ == 0; }

   [[nodiscard]] bool contains(std::size_t i) const
   {
      check_index(i);
      return (bits_ >> i) & 1U;
   }

   [[nodiscard]] Coalition with(std::size_t i) const
   {
      check_index(i);
      return Coalition(n_, bits_ | (std::uint64_t{1} << i), raw_tag{});
   }

   /// S \ {i}: clears exactly bit i.
   [[nodiscard]] Coalition without(std::size_t i) const
   {
      check_index(i);
      return Coalition(n_, bits_ & ~(std::uint64_t{1} << i), raw_tag{});
   }

   [[nodiscard]] Coalition complement() const
   {
      return Coalition(n_, ~bits_ & universe_mask(n_), raw_tag{});
   }

   [[nodiscard]] std::vector< std::size_t > members() const
   {
      std::vector< std::size_t > out;
      out.reserve(size());
      for(auto b = bits_; b != 0; b &= b - 1) {
         out.push_back(static_cast< std::size_t >(std::countr_zero(b)));
      }
      return out;
   }

   friend Coalition operator|(const Coalition& a, const Coalition& b)
   {
      check_same(a, b);
      return Coalition(a.n_, a.bits_ | b.bits_, raw_tag{});
   }
   friend Coalition operator&(const Coalition& a, const Coalition& b)
   {
      check_same(a, b);
      return Coalition(a.n_, a.bits_ & b.bits_, raw_tag{});
   }
   friend bool operator==(const Coalition&, const Coalition&) = default;

   [[nodiscard]] std::string to_string() const
   {
      std::string s = "{";
      bool first = true;
      for(auto m : members()) {
         if(! first) {
            s += ',';
         }
         s += std::to_string(m);
         first = false;
      }
      return s + "}";
   }

   static constexpr std::uint64_t universe_mask(std::size_t n) noexcept
   {
      return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
   }

  private:
   struct raw_tag {};
   Coalition(std::size_t n, std::uint64_t bits, raw_tag) : bits_(bits), n_(n) {}

   void check_index(std::size_t i) const
   {
      if(i >= n_) {
         throw IndexError(
            "Coalition: player index " + std::to_string(i) + " out of range for n=" + std::to_string(n_));
      }
   }
   static void check_same(const Coalition& a, const Coalition& b)
   {
      if(a.n_ != b.n_) {
         throw ShapeError("Coalition: player counts differ");
      }
   }

   std::uint64_t bits_ = 0;
   std::size_t n_ = 0;
};

}  // namespace shapcred

#endif  // SHAPCRED_COALITION_HPP
