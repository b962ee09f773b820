#include "feedersim/transport.hpp"

#include "feedersim/channel.hpp"
#include "feedersim/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <thread>
#include <vector>

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

namespace feedersim {

namespace {

// In-process transport ---------------------------------------------------

class ThreadWorkerLink final : public WorkerLink {
public:
  ThreadWorkerLink(std::size_t index, Channel<Frame>& inbox, Channel<Incoming>& outbox)
    : index_(index), inbox_(inbox), outbox_(outbox)
  {}

  Frame receive() override
  {
    auto frame = inbox_.receive();
    if (!frame)
      throw ExecutionError("coordinator channel closed");
    return std::move(*frame);
  }

  void send(const Frame& frame) override
  {
    if (!outbox_.send(Incoming{index_, frame, {}}))
      throw ExecutionError("coordinator channel closed");
  }

private:
  std::size_t index_;
  Channel<Frame>& inbox_;
  Channel<Incoming>& outbox_;
};

class ThreadCoordinatorLink final : public CoordinatorLink {
public:
  ThreadCoordinatorLink(std::size_t n, WorkerMain main)
  {
    for (std::size_t i = 0; i < n; ++i)
      inboxes_.push_back(std::make_unique<Channel<Frame>>());
    threads_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      threads_.emplace_back([this, i, main] {
        ThreadWorkerLink link(i, *inboxes_[i], outbox_);
        try {
          main(i, link);
          outbox_.send(Incoming{i, std::nullopt, {}});
        } catch (const std::exception& e) {
          outbox_.send(Incoming{i, std::nullopt, e.what()});
        }
      });
    }
  }

  ~ThreadCoordinatorLink() override
  {
    abort();
    join();
  }

  std::size_t size() const noexcept override { return inboxes_.size(); }

  bool send(std::size_t worker, const Frame& frame) override
  {
    return inboxes_.at(worker)->send(frame);
  }

  bool receive_until(std::chrono::steady_clock::time_point deadline, Incoming& out) override
  {
    switch (outbox_.receive_until(deadline, out)) {
    case Channel<Incoming>::Status::ok:
      return true;
    case Channel<Incoming>::Status::timeout:
      return false;
    case Channel<Incoming>::Status::closed:
      break;
    }
    throw ExecutionError("worker outbox closed");
  }

  void abort() noexcept override
  {
    for (auto& inbox : inboxes_)
      inbox->close();
  }

  void join() override
  {
    for (auto& t : threads_)
      if (t.joinable())
        t.join();
  }

private:
  std::vector<std::unique_ptr<Channel<Frame>>> inboxes_;
  Channel<Incoming> outbox_;
  std::vector<std::thread> threads_;
};

// Multi-process transport -------------------------------------------------

bool write_all(int fd, const std::vector<std::uint8_t>& bytes)
{
  std::size_t done = 0;
  while (done < bytes.size()) {
    ssize_t n = ::send(fd, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR)
        continue;
      return false;
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

class SocketWorkerLink final : public WorkerLink {
public:
  explicit SocketWorkerLink(int fd) : fd_(fd) {}

  Frame receive() override
  {
    Frame frame;
    std::uint8_t buf[4096];
    while (!reader_.next(frame)) {
      ssize_t n = ::read(fd_, buf, sizeof buf);
      if (n < 0 && errno == EINTR)
        continue;
      if (n <= 0)
        throw ExecutionError("coordinator connection closed");
      reader_.feed(std::span(buf, static_cast<std::size_t>(n)));
    }
    return frame;
  }

  void send(const Frame& frame) override
  {
    if (!write_all(fd_, encode_frame(frame)))
      throw ExecutionError("coordinator connection closed");
  }

private:
  int fd_;
  FrameReader reader_;
};

class ProcessCoordinatorLink final : public CoordinatorLink {
public:
  ProcessCoordinatorLink(std::size_t n, const WorkerMain& main)
  {
    std::fflush(nullptr);
    workers_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      int sv[2];
      if (::socketpair(AF_UNIX, SOCK_STREAM, 0, sv) != 0)
        throw ExecutionError(std::string("socketpair: ") + std::strerror(errno));
      pid_t pid = ::fork();
      if (pid < 0) {
        ::close(sv[0]);
        ::close(sv[1]);
        abort();
        join();
        throw ExecutionError(std::string("fork: ") + std::strerror(errno));
      }
      if (pid == 0) {
        ::close(sv[0]);
        for (std::size_t j = 0; j < i; ++j)
          ::close(workers_[j].fd);
        int status = 0;
        try {
          SocketWorkerLink link(sv[1]);
          main(i, link);
        } catch (const std::exception& e) {
          std::fprintf(stderr, "worker %zu: %s\n", i, e.what());
          status = 3;
        }
        ::close(sv[1]);
        ::_exit(status);
      }
      ::close(sv[1]);
      workers_[i].fd = sv[0];
      workers_[i].pid = pid;
    }
  }

  ~ProcessCoordinatorLink() override
  {
    abort();
    join();
  }

  std::size_t size() const noexcept override { return workers_.size(); }

  bool send(std::size_t worker, const Frame& frame) override
  {
    auto& w = workers_.at(worker);
    return w.fd >= 0 && write_all(w.fd, encode_frame(frame));
  }

  bool receive_until(std::chrono::steady_clock::time_point deadline, Incoming& out) override
  {
    for (;;) {
      for (std::size_t k = 0; k < workers_.size(); ++k) {
        std::size_t i = (next_ + k) % workers_.size();
        auto& w = workers_[i];
        Frame frame;
        if (w.reader.next(frame)) {
          next_ = i + 1;
          out = Incoming{i, std::move(frame), {}};
          return true;
        }
        if (w.eof && !w.eof_reported) {
          w.eof_reported = true;
          out = Incoming{i, std::nullopt, exit_description(i)};
          return true;
        }
      }

      std::vector<pollfd> fds;
      std::vector<std::size_t> owner;
      for (std::size_t i = 0; i < workers_.size(); ++i)
        if (!workers_[i].eof && workers_[i].fd >= 0) {
          fds.push_back({workers_[i].fd, POLLIN, 0});
          owner.push_back(i);
        }
      if (fds.empty())
        throw ExecutionError("all worker connections closed");

      auto now = std::chrono::steady_clock::now();
      if (now >= deadline)
        return false;
      auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1;
      int ready = ::poll(fds.data(), fds.size(), static_cast<int>(std::min<long long>(wait, 1000)));
      if (ready < 0) {
        if (errno == EINTR)
          continue;
        throw ExecutionError(std::string("poll: ") + std::strerror(errno));
      }
      for (std::size_t k = 0; k < fds.size(); ++k) {
        if (!(fds[k].revents & (POLLIN | POLLHUP | POLLERR)))
          continue;
        auto& w = workers_[owner[k]];
        std::uint8_t buf[65536];
        ssize_t n = ::read(w.fd, buf, sizeof buf);
        if (n > 0)
          w.reader.feed(std::span(buf, static_cast<std::size_t>(n)));
        else if (n == 0 || errno != EINTR)
          w.eof = true;
      }
    }
  }

  void abort() noexcept override
  {
    for (auto& w : workers_)
      if (w.pid > 0 && !w.reaped)
        ::kill(w.pid, SIGKILL);
  }

  void join() override
  {
    for (auto& w : workers_) {
      if (w.pid > 0 && !w.reaped) {
        int status = 0;
        while (::waitpid(w.pid, &status, 0) < 0 && errno == EINTR) {
        }
        w.reaped = true;
        w.status = status;
      }
      if (w.fd >= 0) {
        ::close(w.fd);
        w.fd = -1;
      }
    }
  }

private:
  std::string exit_description(std::size_t i)
  {
    auto& w = workers_[i];
    if (w.pid > 0 && !w.reaped) {
      int status = 0;
      if (::waitpid(w.pid, &status, 0) == w.pid) {
        w.reaped = true;
        w.status = status;
      }
    }
    if (!w.reaped || (WIFEXITED(w.status) && WEXITSTATUS(w.status) == 0))
      return {};
    if (WIFSIGNALED(w.status))
      return "worker process killed by signal " + std::to_string(WTERMSIG(w.status));
    return "worker process exited with status " + std::to_string(WEXITSTATUS(w.status));
  }

  struct Worker {
    int fd = -1;
    pid_t pid = -1;
    FrameReader reader;
    bool eof = false;
    bool eof_reported = false;
    bool reaped = false;
    int status = 0;
  };

  std::vector<Worker> workers_;
  std::size_t next_ = 0;
};

} // namespace

std::unique_ptr<CoordinatorLink> launch_workers(TransportKind kind, std::size_t n_workers,
                                                WorkerMain worker_main)
{
  if (kind == TransportKind::process)
    return std::make_unique<ProcessCoordinatorLink>(n_workers, worker_main);
  return std::make_unique<ThreadCoordinatorLink>(n_workers, std::move(worker_main));
}

} // namespace feedersim
