#include "feedersim/channel.hpp"
#include "feedersim/message.hpp"

#include <gtest/gtest.h>

#include <random>
#include <thread>

using namespace feedersim;

namespace {

Frame random_frame(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  switch (rng() % 5) {
  case 0:
    return PriceBroadcast{rng(), u(rng)};
  case 1: {
    AggregateReport r{static_cast<std::uint32_t>(rng()), rng() % 1000, 0, {}};
    r.values.resize(rng() % 50);
    for (auto& v : r.values)
      v = u(rng);
    r.step_end = r.step_begin + r.values.size();
    return r;
  }
  case 2:
    return RunComplete{static_cast<std::uint32_t>(rng())};
  case 3:
    return Shutdown{};
  default:
    return Release{rng()};
  }
}

std::span<const std::uint8_t> body_of(const std::vector<std::uint8_t>& bytes)
{
  return std::span(bytes).subspan(4);
}

} // namespace

TEST(Codec, LayoutOfPriceBroadcast)
{
  auto bytes = encode_frame(PriceBroadcast{3, 1.0});
  std::vector<std::uint8_t> expect = {17, 0, 0, 0, tag::price_broadcast, 3, 0, 0, 0, 0, 0, 0, 0,
                                      0,  0, 0, 0, 0, 0, 0xf0, 0x3f};
  EXPECT_EQ(bytes, expect);
}

TEST(Codec, RoundTripRandomFrames)
{
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    Frame f = random_frame(rng);
    auto bytes = encode_frame(f);
    std::uint32_t len = bytes[0] | bytes[1] << 8 | bytes[2] << 16 | std::uint32_t(bytes[3]) << 24;
    ASSERT_EQ(len, bytes.size() - 4);
    ASSERT_EQ(decode_frame_body(body_of(bytes)), f);
  }
}

TEST(Codec, RejectsMalformedBodies)
{
  auto bytes = encode_frame(AggregateReport{1, 0, 2, {1.0, 2.0}});
  auto body = body_of(bytes);
  EXPECT_THROW(decode_frame_body(body.first(body.size() - 1)), std::runtime_error);
  std::vector<std::uint8_t> extra(body.begin(), body.end());
  extra.push_back(0);
  EXPECT_THROW(decode_frame_body(extra), std::runtime_error);
  std::vector<std::uint8_t> unknown = {0x7f};
  EXPECT_THROW(decode_frame_body(unknown), std::runtime_error);
  EXPECT_THROW(decode_frame_body({}), std::runtime_error);
}

TEST(FrameReader, ReassemblesArbitrarySplits)
{
  std::mt19937_64 rng(2);
  std::vector<Frame> frames;
  std::vector<std::uint8_t> stream;
  for (int i = 0; i < 300; ++i) {
    frames.push_back(random_frame(rng));
    auto b = encode_frame(frames.back());
    stream.insert(stream.end(), b.begin(), b.end());
  }
  FrameReader reader;
  std::vector<Frame> got;
  std::size_t pos = 0;
  while (pos < stream.size()) {
    std::size_t n = std::min<std::size_t>(1 + rng() % 37, stream.size() - pos);
    reader.feed(std::span(stream).subspan(pos, n));
    pos += n;
    Frame f;
    while (reader.next(f))
      got.push_back(f);
  }
  EXPECT_EQ(got, frames);
  EXPECT_EQ(reader.buffered(), 0u);
}

TEST(MessageStats, ReleasesNotCounted)
{
  MessageStats s;
  s.count(PriceBroadcast{});
  s.count(AggregateReport{});
  s.count(RunComplete{});
  s.count(Shutdown{});
  s.count(Release{});
  s.count(Release{});
  EXPECT_EQ(s.total(), 4u);
  EXPECT_EQ(s.releases, 2u);
}

TEST(Channel, OrderedDeliveryAndClose)
{
  Channel<int> ch;
  std::jthread producer([&] {
    for (int i = 0; i < 1000; ++i)
      ch.send(i);
    ch.close();
  });
  int expect = 0;
  while (auto v = ch.receive())
    ASSERT_EQ(*v, expect++);
  EXPECT_EQ(expect, 1000);
  EXPECT_FALSE(ch.send(1));
}

TEST(Channel, ReceiveTimesOut)
{
  Channel<int> ch;
  int out = 0;
  auto status = ch.receive_until(std::chrono::steady_clock::now() + std::chrono::milliseconds(5), out);
  EXPECT_EQ(status, Channel<int>::Status::timeout);
}
