#pragma once

// Coordinator/worker protocol. On a byte stream every frame is
//
//   u32 body_length | u8 tag | fields in declaration order
//
// little-endian, doubles as IEEE-754 bit patterns, vectors as u64 count
// followed by the elements.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace feedersim {

/// New market price, effective from `step_index` on.
struct PriceBroadcast {
  std::uint64_t step_index = 0;
  double price = 0.0;
  friend bool operator==(const PriceBroadcast&, const PriceBroadcast&) = default;
};

/// P_L for steps [step_begin, step_end) of one feeder.
struct AggregateReport {
  std::uint32_t feeder_id = 0;
  std::uint64_t step_begin = 0;
  std::uint64_t step_end = 0;
  std::vector<double> values;
  friend bool operator==(const AggregateReport&, const AggregateReport&) = default;
};

struct RunComplete {
  std::uint32_t feeder_id = 0;
  friend bool operator==(const RunComplete&, const RunComplete&) = default;
};

/// Coordinator-initiated abort.
struct Shutdown {
  friend bool operator==(const Shutdown&, const Shutdown&) = default;
};

/// Transport-level synchronization token: the worker may start segment
/// `segment` of the exchange schedule. Not a protocol message; counted separately.
struct Release {
  std::uint64_t segment = 0;
  friend bool operator==(const Release&, const Release&) = default;
};

using Frame = std::variant<PriceBroadcast, AggregateReport, RunComplete, Shutdown, Release>;

namespace tag {
inline constexpr std::uint8_t price_broadcast = 0x01;
inline constexpr std::uint8_t aggregate_report = 0x02;
inline constexpr std::uint8_t run_complete = 0x03;
inline constexpr std::uint8_t shutdown = 0x04;
inline constexpr std::uint8_t release = 0x80;
} // namespace tag

std::string_view frame_name(const Frame& frame) noexcept;

/// Length prefix included.
std::vector<std::uint8_t> encode_frame(const Frame& frame);

/// Decode one body (tag + fields, no length prefix). Throws std::runtime_error
/// on unknown tags, truncation or trailing bytes.
Frame decode_frame_body(std::span<const std::uint8_t> body);

/// Incremental decoder for a byte stream of frames.
class FrameReader {
public:
  void feed(std::span<const std::uint8_t> bytes);

  /// Next complete frame, or false if more bytes are needed.
  bool next(Frame& out);

  std::size_t buffered() const noexcept { return buffer_.size() - consumed_; }

private:
  std::vector<std::uint8_t> buffer_;
  std::size_t consumed_ = 0;
};

struct MessageStats {
  std::size_t price_broadcasts = 0;
  std::size_t aggregate_reports = 0;
  std::size_t run_completes = 0;
  std::size_t shutdowns = 0;
  std::size_t releases = 0; // sync tokens, excluded from total()

  std::size_t total() const noexcept
  {
    return price_broadcasts + aggregate_reports + run_completes + shutdowns;
  }

  void count(const Frame& frame) noexcept;

  friend bool operator==(const MessageStats&, const MessageStats&) = default;
};

} // namespace feedersim
