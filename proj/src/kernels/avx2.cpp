// Compiled with -mavx2; only reached after a runtime CPU check.

#include "kernels_impl.hpp"

#include "feedersim/hashing.hpp"

#include <immintrin.h>

namespace feedersim::kernels::detail {

namespace {

// AVX2 has no 64x64 multiply; assemble the low 64 bits from 32x32 products.
inline __m256i mullo_epi64(__m256i a, __m256i b)
{
  __m256i lo = _mm256_mul_epu32(a, b);
  __m256i a_hi_b = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), b);
  __m256i a_b_hi = _mm256_mul_epu32(a, _mm256_srli_epi64(b, 32));
  __m256i cross = _mm256_slli_epi64(_mm256_add_epi64(a_hi_b, a_b_hi), 32);
  return _mm256_add_epi64(lo, cross);
}

inline __m256i mix64(__m256i z)
{
  const __m256i m1 = _mm256_set1_epi64x(static_cast<long long>(0xbf58476d1ce4e5b9ULL));
  const __m256i m2 = _mm256_set1_epi64x(static_cast<long long>(0x94d049bb133111ebULL));
  z = mullo_epi64(_mm256_xor_si256(z, _mm256_srli_epi64(z, 30)), m1);
  z = mullo_epi64(_mm256_xor_si256(z, _mm256_srli_epi64(z, 27)), m2);
  return _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
}

// (bits >> 12) * 2^-52, exact: the 52-bit integer is spliced into the
// mantissa of 2^52 and the bias subtracted.
inline __m256d to_unit(__m256i bits)
{
  const __m256i exponent = _mm256_set1_epi64x(0x4330000000000000LL);
  const __m256d two52 = _mm256_set1_pd(0x1p52);
  __m256d d = _mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(bits, 12), exponent));
  return _mm256_mul_pd(_mm256_sub_pd(d, two52), _mm256_set1_pd(0x1p-52));
}

} // namespace

void non_tca_power_avx2(const NonTcaBatch& batch, std::span<const double> slot_probability,
                        std::uint64_t step, std::span<double> power_out)
{
  const std::size_t n = batch.stream_seeds.size();
  const __m256i offset = _mm256_set1_epi64x(static_cast<long long>((step + 1) * golden_gamma));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i seed = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&batch.stream_seeds[i]));
    __m256d u = to_unit(mix64(_mm256_add_epi64(seed, offset)));
    __m128i slot = _mm_loadu_si128(reinterpret_cast<const __m128i*>(&batch.schedule_slot[i]));
    __m256d p = _mm256_i32gather_pd(slot_probability.data(), slot, 8);
    __m256d on = _mm256_cmp_pd(u, p, _CMP_LT_OQ);
    __m256d rated = _mm256_loadu_pd(&batch.rated_power[i]);
    _mm256_storeu_pd(&power_out[i], _mm256_and_pd(on, rated));
  }
  for (; i < n; ++i) {
    double u = stream_uniform(batch.stream_seeds[i], step);
    power_out[i] = u < slot_probability[batch.schedule_slot[i]] ? batch.rated_power[i] : 0.0;
  }
}

void uniform_stream_avx2(std::uint64_t seed, std::uint64_t first_step, std::span<double> out)
{
  const std::size_t n = out.size();
  const __m256i base = _mm256_set1_epi64x(static_cast<long long>(seed));
  const __m256i gamma = _mm256_set1_epi64x(static_cast<long long>(golden_gamma));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    std::uint64_t c = first_step + i + 1;
    __m256i counter = _mm256_set_epi64x(static_cast<long long>(c + 3), static_cast<long long>(c + 2),
                                        static_cast<long long>(c + 1), static_cast<long long>(c));
    __m256i z = _mm256_add_epi64(base, mullo_epi64(counter, gamma));
    _mm256_storeu_pd(&out[i], to_unit(mix64(z)));
  }
  for (; i < n; ++i)
    out[i] = stream_uniform(seed, first_step + i);
}

} // namespace feedersim::kernels::detail
