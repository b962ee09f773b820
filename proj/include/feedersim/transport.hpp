#pragma once

#include "feedersim/message.hpp"

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace feedersim {

enum class TransportKind { thread, process };

/// Worker end of one coordinator/worker connection.
class WorkerLink {
public:
  virtual ~WorkerLink() = default;

  /// Blocks for the next frame from the coordinator. Throws ExecutionError
  /// if the connection is gone.
  virtual Frame receive() = 0;
  virtual void send(const Frame& frame) = 0;
};

/// Something that happened on a worker connection. `frame` is empty when the
/// worker's side closed: `error` is then empty for a clean exit.
struct Incoming {
  std::size_t worker = 0;
  std::optional<Frame> frame;
  std::string error;
};

/// Coordinator end: K ordered, reliable connections.
class CoordinatorLink {
public:
  virtual ~CoordinatorLink() = default;

  virtual std::size_t size() const noexcept = 0;

  /// Returns false if the worker's connection is already closed.
  virtual bool send(std::size_t worker, const Frame& frame) = 0;

  /// False on timeout.
  virtual bool receive_until(std::chrono::steady_clock::time_point deadline, Incoming& out) = 0;

  /// Tear the workers down without waiting for them to finish.
  virtual void abort() noexcept = 0;

  /// Wait for every worker to exit.
  virtual void join() = 0;
};

using WorkerMain = std::function<void(std::size_t worker, WorkerLink& link)>;

/// Start `n_workers` running `worker_main`. The process transport forks one
/// child per worker and speaks the binary frame protocol over a socket pair;
/// call it while the calling process is single-threaded.
std::unique_ptr<CoordinatorLink> launch_workers(TransportKind kind, std::size_t n_workers,
                                                WorkerMain worker_main);

} // namespace feedersim
