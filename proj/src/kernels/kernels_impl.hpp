#pragma once

#include "feedersim/kernels.hpp"

namespace feedersim::kernels::detail {

void non_tca_power_scalar(const NonTcaBatch& batch, std::span<const double> slot_probability,
                          std::uint64_t step, std::span<double> power_out);
void uniform_stream_scalar(std::uint64_t seed, std::uint64_t first_step, std::span<double> out);

#if defined(FEEDERSIM_HAVE_AVX2)
void non_tca_power_avx2(const NonTcaBatch& batch, std::span<const double> slot_probability,
                        std::uint64_t step, std::span<double> power_out);
void uniform_stream_avx2(std::uint64_t seed, std::uint64_t first_step, std::span<double> out);
#endif

} // namespace feedersim::kernels::detail
