#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

namespace feedersim {

/// Unbounded, ordered, multi-producer multi-consumer queue.
template <class T>
class Channel {
public:
  enum class Status { ok, timeout, closed };

  /// Returns false if the channel is closed; the value is dropped.
  bool send(T value)
  {
    {
      std::lock_guard lock(mutex_);
      if (closed_)
        return false;
      queue_.push_back(std::move(value));
    }
    ready_.notify_one();
    return true;
  }

  /// Blocks until a value arrives; nullopt once closed and drained.
  std::optional<T> receive()
  {
    std::unique_lock lock(mutex_);
    ready_.wait(lock, [&] { return closed_ || !queue_.empty(); });
    return pop_locked();
  }

  template <class Clock, class Duration>
  Status receive_until(const std::chrono::time_point<Clock, Duration>& deadline, T& out)
  {
    std::unique_lock lock(mutex_);
    if (!ready_.wait_until(lock, deadline, [&] { return closed_ || !queue_.empty(); }))
      return Status::timeout;
    auto v = pop_locked();
    if (!v)
      return Status::closed;
    out = std::move(*v);
    return Status::ok;
  }

  void close()
  {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    ready_.notify_all();
  }

private:
  std::optional<T> pop_locked()
  {
    if (queue_.empty())
      return std::nullopt;
    T v = std::move(queue_.front());
    queue_.pop_front();
    return v;
  }

  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<T> queue_;
  bool closed_ = false;
};

} // namespace feedersim
