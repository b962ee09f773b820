#include "kernels_impl.hpp"

#include "feedersim/hashing.hpp"

namespace feedersim::kernels::detail {

void non_tca_power_scalar(const NonTcaBatch& batch, std::span<const double> slot_probability,
                          std::uint64_t step, std::span<double> power_out)
{
  const std::size_t n = batch.stream_seeds.size();
  for (std::size_t i = 0; i < n; ++i) {
    double u = stream_uniform(batch.stream_seeds[i], step);
    double p = slot_probability[batch.schedule_slot[i]];
    power_out[i] = u < p ? batch.rated_power[i] : 0.0;
  }
}

void uniform_stream_scalar(std::uint64_t seed, std::uint64_t first_step, std::span<double> out)
{
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = stream_uniform(seed, first_step + i);
}

} // namespace feedersim::kernels::detail
