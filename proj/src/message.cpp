#include "feedersim/message.hpp"

#include <bit>
#include <stdexcept>

namespace feedersim {

namespace {

class Writer {
public:
  void u8(std::uint8_t v) { out.push_back(v); }

  template <class T>
  void le(T v)
  {
    for (std::size_t i = 0; i < sizeof(T); ++i)
      out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
  }

  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }

  std::vector<std::uint8_t> out;
};

class Reader {
public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8()
  {
    need(1);
    return data_[pos_++];
  }

  template <class T>
  T le()
  {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }

  void finish() const
  {
    if (pos_ != data_.size())
      throw std::runtime_error("frame has trailing bytes");
  }

  std::size_t remaining() const noexcept { return data_.size() - pos_; }

private:
  void need(std::size_t n) const
  {
    if (data_.size() - pos_ < n)
      throw std::runtime_error("truncated frame");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

} // namespace

std::string_view frame_name(const Frame& frame) noexcept
{
  constexpr std::string_view names[] = {"PriceBroadcast", "AggregateReport", "RunComplete",
                                        "Shutdown", "Release"};
  return names[frame.index()];
}

std::vector<std::uint8_t> encode_frame(const Frame& frame)
{
  Writer w;
  w.le<std::uint32_t>(0); // patched below
  std::visit(
    [&](const auto& m) {
      using T = std::decay_t<decltype(m)>;
      if constexpr (std::is_same_v<T, PriceBroadcast>) {
        w.u8(tag::price_broadcast);
        w.le<std::uint64_t>(m.step_index);
        w.f64(m.price);
      } else if constexpr (std::is_same_v<T, AggregateReport>) {
        w.u8(tag::aggregate_report);
        w.le<std::uint32_t>(m.feeder_id);
        w.le<std::uint64_t>(m.step_begin);
        w.le<std::uint64_t>(m.step_end);
        w.le<std::uint64_t>(m.values.size());
        for (double v : m.values)
          w.f64(v);
      } else if constexpr (std::is_same_v<T, RunComplete>) {
        w.u8(tag::run_complete);
        w.le<std::uint32_t>(m.feeder_id);
      } else if constexpr (std::is_same_v<T, Shutdown>) {
        w.u8(tag::shutdown);
      } else {
        w.u8(tag::release);
        w.le<std::uint64_t>(m.segment);
      }
    },
    frame);
  auto body = static_cast<std::uint32_t>(w.out.size() - 4);
  for (int i = 0; i < 4; ++i)
    w.out[i] = static_cast<std::uint8_t>(body >> (8 * i));
  return std::move(w.out);
}

Frame decode_frame_body(std::span<const std::uint8_t> body)
{
  Reader r(body);
  Frame out;
  switch (r.u8()) {
  case tag::price_broadcast: {
    PriceBroadcast m;
    m.step_index = r.le<std::uint64_t>();
    m.price = r.f64();
    out = m;
    break;
  }
  case tag::aggregate_report: {
    AggregateReport m;
    m.feeder_id = r.le<std::uint32_t>();
    m.step_begin = r.le<std::uint64_t>();
    m.step_end = r.le<std::uint64_t>();
    auto n = r.le<std::uint64_t>();
    if (n > r.remaining() / 8)
      throw std::runtime_error("truncated frame");
    m.values.resize(n);
    for (auto& v : m.values)
      v = r.f64();
    out = std::move(m);
    break;
  }
  case tag::run_complete:
    out = RunComplete{r.le<std::uint32_t>()};
    break;
  case tag::shutdown:
    out = Shutdown{};
    break;
  case tag::release:
    out = Release{r.le<std::uint64_t>()};
    break;
  default:
    throw std::runtime_error("unknown frame tag");
  }
  r.finish();
  return out;
}

void FrameReader::feed(std::span<const std::uint8_t> bytes)
{
  if (consumed_ > 0 && consumed_ == buffer_.size()) {
    buffer_.clear();
    consumed_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

bool FrameReader::next(Frame& out)
{
  std::size_t avail = buffer_.size() - consumed_;
  if (avail < 4)
    return false;
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i)
    len |= static_cast<std::uint32_t>(buffer_[consumed_ + i]) << (8 * i);
  if (avail < 4 + static_cast<std::size_t>(len))
    return false;
  out = decode_frame_body(std::span(buffer_).subspan(consumed_ + 4, len));
  consumed_ += 4 + len;
  if (consumed_ > (1u << 20) && consumed_ * 2 > buffer_.size()) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(consumed_));
    consumed_ = 0;
  }
  return true;
}

void MessageStats::count(const Frame& frame) noexcept
{
  switch (frame.index()) {
  case 0:
    ++price_broadcasts;
    break;
  case 1:
    ++aggregate_reports;
    break;
  case 2:
    ++run_completes;
    break;
  case 3:
    ++shutdowns;
    break;
  default:
    ++releases;
    break;
  }
}

} // namespace feedersim
