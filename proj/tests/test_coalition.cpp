#include <gtest/gtest.h>

#include "shapcred/coalition.hpp"
#include "shapcred/errors.hpp"

using shapcred::Coalition;

TEST(Coalition, EmptyFullSingleton)
{
   EXPECT_EQ(Coalition::empty(5).size(), 0u);
   EXPECT_TRUE(Coalition::empty(5).is_empty());
   EXPECT_EQ(Coalition::full(5).size(), 5u);
   EXPECT_EQ(Coalition::full(5).bits(), 0b11111u);
   EXPECT_EQ(Coalition::full(64).size(), 64u);
   const auto s = Coalition::singleton(5, 3);
   EXPECT_EQ(s.members(), (std::vector< std::size_t >{3}));
   EXPECT_TRUE(s.contains(3));
   EXPECT_FALSE(s.contains(2));
}

TEST(Coalition, WithWithoutComplement)
{
   const auto s = Coalition::empty(4).with(0).with(2);
   EXPECT_EQ(s.to_string(), "{0,2}");
   EXPECT_EQ(s.without(0), Coalition::singleton(4, 2));
   EXPECT_EQ(s.without(1), s);
   EXPECT_EQ(s.complement().members(), (std::vector< std::size_t >{1, 3}));
   EXPECT_EQ((s | s.complement()), Coalition::full(4));
   EXPECT_TRUE((s & s.complement()).is_empty());
}

TEST(Coalition, RejectsBadArguments)
{
   EXPECT_THROW(Coalition(0), shapcred::ParameterError);
   EXPECT_THROW(Coalition(65), shapcred::ParameterError);
   EXPECT_THROW(Coalition(3, 0b1000), shapcred::IndexError);
   EXPECT_THROW((void)Coalition::empty(3).with(3), shapcred::IndexError);
   EXPECT_THROW((void)Coalition::empty(3).contains(7), shapcred::IndexError);
   EXPECT_THROW((void)(Coalition::empty(3) | Coalition::empty(4)), shapcred::ShapeError);
}

TEST(Coalition, SizeMatchesMemberCount)
{
   for(std::uint64_t m = 0; m < 256; ++m) {
      const Coalition s(8, m);
      EXPECT_EQ(s.size(), s.members().size());
      EXPECT_EQ(s.complement().size(), 8 - s.size());
   }
}
