#include <gtest/gtest.h>

#include <set>

#include "sdira/extractor.hpp"
#include "sdira/rng.hpp"

using namespace sdira;

namespace {
BitString random_bits(Rng& rng, std::size_t n) {
  std::vector<std::uint8_t> b(n);
  for (auto& v : b) v = static_cast<std::uint8_t>(rng.next() & 1u);
  return BitString(std::move(b));
}

BitString from_int(std::uint64_t v, std::size_t n) {
  std::vector<std::uint8_t> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>((v >> i) & 1u);
  return BitString(std::move(b));
}
}  // namespace

TEST(Extract, WorkedExamples) {
  const auto k1 = extract(BitString::parse_binary("101"), BitString::parse_binary("110"), {3, 3, 1});
  EXPECT_EQ(k1.to_binary(), "1");
  const auto k3 = extract(BitString::parse_binary("111"), BitString::parse_binary("101"), {3, 3, 3});
  EXPECT_EQ(k3.to_binary(), "000");
  const auto k_rot = extract(BitString::parse_binary("100"), BitString::parse_binary("101"), {3, 3, 3});
  EXPECT_EQ(k_rot.to_binary(), "101");
}

TEST(Extract, ZeroInputGivesZeroOutput) {
  Rng rng(5);
  const BitString zero(std::vector<std::uint8_t>(31, 0));
  for (int t = 0; t < 50; ++t) {
    EXPECT_EQ(extract(zero, random_bits(rng, 31), {31, 31, 16}).to_binary(), std::string(16, '0'));
  }
}

TEST(Extract, LinearInFirstInput) {
  Rng rng(17);
  const ExtractorSpec spec{101, 101, 40};
  for (int t = 0; t < 200; ++t) {
    const auto a = random_bits(rng, 101);
    const auto b = random_bits(rng, 101);
    const auto z = random_bits(rng, 101);
    EXPECT_EQ(extract(a ^ b, z, spec), extract(a, z, spec) ^ extract(b, z, spec));
  }
}

TEST(Extract, SpecAndLengthErrors) {
  const auto a = BitString::parse_binary("1010");
  EXPECT_THROW(extract(a, a, {4, 4, 1}), DomainError);
  const auto b = BitString::parse_binary("101");
  EXPECT_THROW(extract(b, b, {3, 5, 1}), DomainError);
  EXPECT_THROW(extract(b, b, {3, 3, 4}), DomainError);
  EXPECT_THROW(extract(b, BitString::parse_binary("10101"), {3, 3, 1}), DomainError);
  EXPECT_EQ(extract(b, b, {3, 3, 0}).size(), 0u);
}

TEST(Extract, RotationsDistinctForPrimeLengths) {
  for (std::size_t n : {3u, 5u, 7u, 11u, 13u}) {
    for (std::uint64_t v = 1; v + 1 < (std::uint64_t{1} << n); ++v) {
      std::set<std::string> seen;
      const auto z = from_int(v, n);
      for (std::size_t j = 0; j < n; ++j) {
        std::string r;
        for (std::size_t i = 0; i < n; ++i) r.push_back(static_cast<char>('0' + z[(i + j) % n]));
        seen.insert(r);
      }
      ASSERT_EQ(seen.size(), n) << "n " << n << " z " << z.to_binary();
    }
  }
}

TEST(BitStrings, HexFormat) {
  EXPECT_EQ(BitString::from_hex("5:1a").to_binary(), "11010");
  EXPECT_EQ(BitString::parse_binary("11010").to_hex(), "5:1a");
  EXPECT_EQ(BitString::parse_binary("1").to_hex(), "1:1");
  EXPECT_EQ(BitString::parse_binary("00000000").to_hex(), "8:00");
  EXPECT_EQ(BitString().to_hex(), "0:0");
  EXPECT_EQ(BitString::from_hex("0:0").size(), 0u);
  Rng rng(8);
  for (std::size_t n = 1; n < 70; ++n) {
    const auto s = random_bits(rng, n);
    EXPECT_EQ(BitString::from_hex(s.to_hex()), s);
  }
}

TEST(BitStrings, HexErrors) {
  EXPECT_THROW(BitString::from_hex("1a"), DomainError);
  EXPECT_THROW(BitString::from_hex("3:f"), DomainError);
  EXPECT_THROW(BitString::from_hex("5:1g"), DomainError);
  EXPECT_THROW(BitString::from_hex("4:123"), DomainError);
  EXPECT_THROW(BitString::parse_binary("102"), DomainError);
}

TEST(Strongness, KernelBoundMatchesCirculantAlgebra) {
  // x^11 - 1 = (x + 1) * Phi_11 over GF(2), Phi_11 irreducible: only 1 + x has a kernel, of size 2.
  std::vector<BitString> a_set;
  for (std::uint64_t v = 0; v < 512; ++v) a_set.push_back(from_int(v << 2, 11));
  const auto r = strongness_check(a_set, {11, 11, 2});
  EXPECT_NEAR(r.bound, 0.5 * std::sqrt(4.0 / 512.0), 1e-15);
}

TEST(Strongness, DeficientSetsStayWithinBound) {
  const ExtractorSpec spec{11, 11, 2};
  std::vector<std::vector<BitString>> sets(4);
  for (std::uint64_t v = 0; v < 512; ++v) {
    sets[0].push_back(from_int(v << 2, 11));
    sets[1].push_back(from_int(v | (std::uint64_t{3} << 9), 11));
  }
  for (std::uint64_t v = 0; v < 2048; ++v) {
    const auto bit = [&](int i) { return (v >> i) & 1u; };
    if (bit(0) == (bit(1) ^ bit(2)) && bit(3) == bit(4)) sets[2].push_back(from_int(v, 11));
  }
  ASSERT_EQ(sets[2].size(), 512u);
  Rng rng(99);
  std::set<std::uint64_t> chosen;
  while (chosen.size() < 512) chosen.insert(rng.below(2048));
  for (auto v : chosen) sets[3].push_back(from_int(v, 11));
  for (const auto& s : sets) {
    const auto r = strongness_check(s, spec);
    EXPECT_TRUE(r.within_bound) << r.distance << " vs " << r.bound;
    EXPECT_GE(r.distance, 0.0);
  }
}

TEST(Strongness, SmallSetsHaveLargerBias) {
  std::vector<BitString> tiny;
  for (std::uint64_t v = 0; v < 4; ++v) tiny.push_back(from_int(v, 11));
  const auto r = strongness_check(tiny, {11, 11, 2});
  EXPECT_TRUE(r.within_bound);
  EXPECT_GT(r.distance, 0.1);
}

TEST(Uniformity, PassesOnSeededUniform) {
  Rng rng(2024);
  std::vector<BitString> samples;
  for (int i = 0; i < 10000; ++i) samples.push_back(random_bits(rng, 16));
  const auto r = uniformity_test(samples, 0.01);
  EXPECT_TRUE(r.passed) << r.worst_test << " p " << r.min_p_value;
  EXPECT_EQ(r.tests, 16u + 120u);
}

TEST(Uniformity, FailsOnConstantAndBiased) {
  std::vector<BitString> constant(2000, BitString::parse_binary("0110"));
  const auto c = uniformity_test(constant, 0.01);
  EXPECT_FALSE(c.passed);
  EXPECT_TRUE(c.zero_variance);
  Rng rng(4);
  std::vector<BitString> biased;
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::uint8_t> b(8);
    for (auto& v : b) v = static_cast<std::uint8_t>(rng.bernoulli(0.55));
    biased.emplace_back(std::move(b));
  }
  EXPECT_FALSE(uniformity_test(biased, 0.01).passed);
  std::vector<BitString> copied;
  for (int i = 0; i < 10000; ++i) {
    const int bit = rng.bernoulli(0.5);
    copied.emplace_back(std::vector<std::uint8_t>{static_cast<std::uint8_t>(bit), static_cast<std::uint8_t>(bit)});
  }
  EXPECT_FALSE(uniformity_test(copied, 0.01).passed);
}

TEST(Uniformity, InputErrors) {
  std::vector<BitString> few(999, BitString::parse_binary("01"));
  EXPECT_THROW(uniformity_test(few, 0.01), DomainError);
  std::vector<BitString> mixed(1000, BitString::parse_binary("01"));
  mixed.back() = BitString::parse_binary("011");
  EXPECT_THROW(uniformity_test(mixed, 0.01), DomainError);
}

TEST(Uniformity, ExtractorOutputsFromUniformInputs) {
  Rng rng(Rng::stream(77, streams::kSecondSource));
  const ExtractorSpec spec{101, 101, 16};
  std::vector<BitString> out;
  for (int i = 0; i < 10000; ++i) out.push_back(extract(random_bits(rng, 101), random_bits(rng, 101), spec));
  const auto r = uniformity_test(out, 0.01);
  EXPECT_TRUE(r.passed) << r.worst_test << " p " << r.min_p_value;
}
