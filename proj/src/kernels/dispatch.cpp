#include "kernels_impl.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace feedersim::kernels {

namespace {

Isa detect()
{
  if (const char* forced = std::getenv("FEEDERSIM_ISA")) {
    std::string name{forced};
    if (name == "scalar")
      return Isa::scalar;
    if (name == "avx2" && isa_supported(Isa::avx2))
      return Isa::avx2;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active()
{
  static std::atomic<Isa> isa{detect()};
  return isa;
}

} // namespace

std::string_view isa_name(Isa isa) noexcept
{
  switch (isa) {
  case Isa::scalar:
    return "scalar";
  case Isa::avx2:
    return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept
{
  switch (isa) {
  case Isa::scalar:
    return true;
  case Isa::avx2:
#if defined(FEEDERSIM_HAVE_AVX2)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa)
{
  if (!isa_supported(isa))
    throw std::invalid_argument("ISA not supported on this CPU: " + std::string(isa_name(isa)));
  active().store(isa, std::memory_order_relaxed);
}

void non_tca_power(Isa isa, const NonTcaBatch& batch, std::span<const double> slot_probability,
                   std::uint64_t step, std::span<double> power_out)
{
  if (batch.schedule_slot.size() != batch.stream_seeds.size() ||
      batch.rated_power.size() != batch.stream_seeds.size() ||
      power_out.size() < batch.stream_seeds.size())
    throw std::invalid_argument("non_tca_power: mismatched batch lengths");
#if defined(FEEDERSIM_HAVE_AVX2)
  if (isa == Isa::avx2) {
    detail::non_tca_power_avx2(batch, slot_probability, step, power_out);
    return;
  }
#endif
  (void)isa;
  detail::non_tca_power_scalar(batch, slot_probability, step, power_out);
}

void non_tca_power(const NonTcaBatch& batch, std::span<const double> slot_probability,
                   std::uint64_t step, std::span<double> power_out)
{
  non_tca_power(active_isa(), batch, slot_probability, step, power_out);
}

void uniform_stream(Isa isa, std::uint64_t seed, std::uint64_t first_step, std::span<double> out)
{
#if defined(FEEDERSIM_HAVE_AVX2)
  if (isa == Isa::avx2) {
    detail::uniform_stream_avx2(seed, first_step, out);
    return;
  }
#endif
  (void)isa;
  detail::uniform_stream_scalar(seed, first_step, out);
}

void uniform_stream(std::uint64_t seed, std::uint64_t first_step, std::span<double> out)
{
  uniform_stream(active_isa(), seed, first_step, out);
}

} // namespace feedersim::kernels
