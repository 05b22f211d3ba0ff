#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pdpsim/rng.hpp"
#include "pdpsim/simd/kernels.hpp"

using pdp::Complex;
namespace simd = pdp::simd;

namespace {

struct SplitVec {
  std::vector<double> re, im;
};

SplitVec random_split(std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  SplitVec v{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    v.re[i] = nd(gen);
    v.im[i] = nd(gen);
  }
  return v;
}

bool close(Complex a, Complex b, double scale) {
  return std::abs(a - b) <= 1e-13 * std::max(1.0, scale);
}

}  // namespace

TEST_CASE("every available kernel variant matches the scalar reference") {
  const simd::Kernels& ref = simd::scalar_kernels();
  const auto variants = simd::available_kernels();
  REQUIRE(!variants.empty());
  CHECK(variants.front()->isa == simd::Isa::Scalar);
  MESSAGE("active isa: " << std::string(simd::to_string(simd::active_kernels().isa)));

  std::mt19937_64 gen(7);
  for (const simd::Kernels* k : variants) {
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 400u, 401u}) {
      CAPTURE(simd::to_string(k->isa));
      CAPTURE(n);
      const SplitVec a = random_split(n, gen);
      const SplitVec b = random_split(n, gen);
      const double scale = static_cast<double>(n);

      CHECK(close(k->dotu(a.re.data(), a.im.data(), b.re.data(), b.im.data(), n),
                  ref.dotu(a.re.data(), a.im.data(), b.re.data(), b.im.data(), n), scale));
      CHECK(close(k->dotc(a.re.data(), a.im.data(), b.re.data(), b.im.data(), n),
                  ref.dotc(a.re.data(), a.im.data(), b.re.data(), b.im.data(), n), scale));
      CHECK(std::abs(k->norm2(a.re.data(), a.im.data(), n) - ref.norm2(a.re.data(), a.im.data(), n)) <=
            1e-13 * std::max(1.0, scale));

      const Complex s(0.3, -1.7);
      std::vector<double> r1(n), i1(n), r2(n), i2(n);
      k->scale_conj(a.re.data(), a.im.data(), s, r1.data(), i1.data(), n);
      ref.scale_conj(a.re.data(), a.im.data(), s, r2.data(), i2.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(r1[i] == doctest::Approx(r2[i]).epsilon(1e-15));
        CHECK(i1[i] == doctest::Approx(i2[i]).epsilon(1e-15));
      }

      SplitVec x = a, y = a;
      k->scale(x.re.data(), x.im.data(), s, n);
      ref.scale(y.re.data(), y.im.data(), s, n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(x.re[i] == doctest::Approx(y.re[i]).epsilon(1e-15));
        CHECK(x.im[i] == doctest::Approx(y.im[i]).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("scalar kernels against std::complex arithmetic") {
  const simd::Kernels& k = simd::scalar_kernels();
  const std::vector<double> ar{1, 2}, ai{0, -1}, br{3, 0}, bi{1, 2};
  // a = (1, 2 - i), b = (3 + i, 2i)
  const Complex dotu = Complex(1, 0) * Complex(3, 1) + Complex(2, -1) * Complex(0, 2);
  const Complex dotc = Complex(1, 0) * Complex(3, 1) + Complex(2, 1) * Complex(0, 2);
  CHECK(k.dotu(ar.data(), ai.data(), br.data(), bi.data(), 2) == dotu);
  CHECK(k.dotc(ar.data(), ai.data(), br.data(), bi.data(), 2) == dotc);
  CHECK(k.norm2(ar.data(), ai.data(), 2) == 6.0);
}

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using P = pdp::Philox4x32;
  CHECK(P::generate({0, 0, 0, 0}, {0, 0}) ==
        P::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(P::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        P::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(P::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        P::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("random streams are reproducible and separated by trajectory and stream id") {
  using pdp::RandomStream;
  using pdp::StreamId;
  RandomStream a(42, 17, StreamId::Branch1);
  RandomStream b(42, 17, StreamId::Branch1);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  std::set<std::uint64_t> firsts;
  for (std::uint64_t traj : {0u, 1u, 2u})
    for (auto id : {StreamId::Initial, StreamId::Branch1, StreamId::Branch2})
      firsts.insert(RandomStream(42, traj, id).next_u64());
  firsts.insert(RandomStream(43, 0, StreamId::Initial).next_u64());
  CHECK(firsts.size() == 10);

  RandomStream u(1, 0, StreamId::Initial);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
  CHECK(u.blocks_used() == static_cast<std::uint64_t>(n / 2));
}
