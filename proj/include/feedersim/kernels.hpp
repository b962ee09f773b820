#pragma once

// Data-parallel inner loops of the per-step pipeline. Each kernel has a
// scalar reference and optional SIMD variants; the variant is picked once at
// runtime from the CPU features (override with FEEDERSIM_ISA=scalar|avx2).
// All variants are bit-identical to the scalar reference.

#include <cstdint>
#include <span>
#include <string_view>

namespace feedersim::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;

/// ISA used by the dispatching entry points below.
Isa active_isa() noexcept;

/// Pin the dispatch to `isa` (tests, benchmarks). Throws if unsupported.
void set_active_isa(Isa isa);

/// Structure-of-arrays view of a batch of stochastic appliances.
struct NonTcaBatch {
  std::span<const std::uint64_t> stream_seeds;
  std::span<const std::uint32_t> schedule_slot;
  std::span<const double> rated_power;
};

/// Mean power of each appliance for `step`: rated power when its own draw
/// falls below the on-probability of its schedule slot, else zero.
/// `slot_probability[schedule_slot[i]]` is the probability for this step.
void non_tca_power(const NonTcaBatch& batch, std::span<const double> slot_probability,
                   std::uint64_t step, std::span<double> power_out);

void non_tca_power(Isa isa, const NonTcaBatch& batch, std::span<const double> slot_probability,
                   std::uint64_t step, std::span<double> power_out);

/// Fill `out` with draws `first_step .. first_step + out.size()` of one stream.
void uniform_stream(std::uint64_t seed, std::uint64_t first_step, std::span<double> out);

void uniform_stream(Isa isa, std::uint64_t seed, std::uint64_t first_step, std::span<double> out);

} // namespace feedersim::kernels
