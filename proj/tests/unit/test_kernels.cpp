#include "feedersim/appliance.hpp"
#include "feedersim/hashing.hpp"
#include "feedersim/kernels.hpp"

#include "support.hpp"

#include <random>

using namespace feedersim;
using namespace feedersim::kernels;

namespace {

std::vector<Isa> supported_isas()
{
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2})
    if (isa_supported(isa))
      out.push_back(isa);
  return out;
}

} // namespace

TEST(Kernels, ScalarAlwaysSupported)
{
  EXPECT_TRUE(isa_supported(Isa::scalar));
  EXPECT_EQ(isa_name(Isa::scalar), "scalar");
}

TEST(Kernels, UniformStreamMatchesReference)
{
  for (Isa isa : supported_isas())
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
      std::vector<double> out(n);
      uniform_stream(isa, 0x1234, 77, out);
      for (std::size_t i = 0; i < n; ++i)
        ASSERT_EQ(std::bit_cast<std::uint64_t>(out[i]), std::bit_cast<std::uint64_t>(stream_uniform(0x1234, 77 + i)))
          << isa_name(isa) << " n=" << n << " i=" << i;
    }
}

TEST(Kernels, NonTcaPowerVariantsBitIdentical)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 7u, 8u, 9u, 1023u}) {
    std::vector<std::uint64_t> seeds(n);
    std::vector<std::uint32_t> slots(n);
    std::vector<double> rated(n);
    for (std::size_t i = 0; i < n; ++i) {
      seeds[i] = rng();
      slots[i] = static_cast<std::uint32_t>(rng() % 5);
      rated[i] = 0.1 + 3 * u(rng);
    }
    std::vector<double> probs = {0.0, 1.0, 0.3, u(rng), u(rng)};
    NonTcaBatch batch{seeds, slots, rated};
    for (std::uint64_t step : {0ull, 1ull, 99ull, 1ull << 40}) {
      std::vector<double> ref(n), got(n);
      non_tca_power(Isa::scalar, batch, probs, step, ref);
      for (std::size_t i = 0; i < n; ++i) {
        // scalar reference equals the per-appliance model
        NonTcaSpec spec{rated[i], nullptr, seeds[i]};
        double expect = non_tca_draw(spec, step) < probs[slots[i]] ? rated[i] : 0.0;
        ASSERT_EQ(ref[i], expect);
      }
      for (Isa isa : supported_isas()) {
        non_tca_power(isa, batch, probs, step, got);
        ASSERT_TRUE(test::bit_equal(ref, got)) << isa_name(isa) << " n=" << n;
      }
    }
  }
}

TEST(Kernels, ForcedIsaDispatch)
{
  const Isa before = active_isa();
  for (Isa isa : supported_isas()) {
    set_active_isa(isa);
    EXPECT_EQ(active_isa(), isa);
    std::vector<double> out(9);
    uniform_stream(3, 0, out);
    EXPECT_EQ(out[8], stream_uniform(3, 8));
  }
  set_active_isa(before);
  if (!isa_supported(Isa::avx2))
    EXPECT_THROW(set_active_isa(Isa::avx2), std::exception);
}

TEST(Hashing, UnitIntervalBounds)
{
  EXPECT_EQ(to_unit(0), 0.0);
  EXPECT_LT(to_unit(~0ull), 1.0);
}

TEST(Hashing, DoubleHashSensitiveToBits)
{
  std::vector<double> a = {1.0, 2.0, 3.0};
  std::vector<double> b = {1.0, 2.0, std::nextafter(3.0, 4.0)};
  EXPECT_NE(hash_doubles(a), hash_doubles(b));
  EXPECT_EQ(hash_doubles(a), hash_doubles(std::vector<double>{1.0, 2.0, 3.0}));
}
