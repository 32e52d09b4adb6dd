#include "sgram/adapter.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <ctime>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace sgram::amr2sg {

namespace {

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

std::string describe_status(int status) {
  if (WIFEXITED(status)) {
    return "exited with status " + std::to_string(WEXITSTATUS(status));
  }
  if (WIFSIGNALED(status)) {
    return "killed by signal " + std::to_string(WTERMSIG(status));
  }
  return "terminated";
}

// Writes everything or returns false on EPIPE/error. SIGPIPE is blocked for
// the calling thread and any pending instance is consumed.
bool write_all(int fd, std::string_view data) {
  sigset_t pipe_set, old_set;
  sigemptyset(&pipe_set);
  sigaddset(&pipe_set, SIGPIPE);
  pthread_sigmask(SIG_BLOCK, &pipe_set, &old_set);
  bool ok = true;
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      ok = false;
      break;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  if (!ok) {
    const timespec zero{0, 0};
    while (sigtimedwait(&pipe_set, nullptr, &zero) > 0) {
    }
  }
  pthread_sigmask(SIG_SETMASK, &old_set, nullptr);
  return ok;
}

}  // namespace

ExternalAdapter::ExternalAdapter(std::string command,
                                 std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  if (command_.find_first_not_of(" \t") == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "adapter command is empty");
  }
  if (timeout_.count() <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "adapter timeout must be > 0");
  }
}

ExternalAdapter::~ExternalAdapter() { stop(); }

void ExternalAdapter::start() {
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kIo, std::string("pipe: ") + std::strerror(errno));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error(ErrorCode::kIo, std::string("pipe: ") + std::strerror(errno));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  std::string shell = "/bin/sh";
  std::string flag = "-c";
  char* argv[] = {shell.data(), flag.data(), command_.data(), nullptr};
  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, shell.c_str(), &actions, nullptr, argv,
                               environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw AdapterError(ErrorCode::kAdapterCrashed,
                       "cannot start adapter: " + std::string(std::strerror(rc)),
                       "");
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();
}

int ExternalAdapter::reap(bool wait) {
  int status = 0;
  if (pid_ > 0) {
    // A child that closed its stdout gets a short grace period to exit.
    if (wait) {
      const auto until =
          std::chrono::steady_clock::now() + std::chrono::milliseconds(500);
      for (;;) {
        const pid_t r = ::waitpid(pid_, &status, WNOHANG);
        if (r == pid_ || (r < 0 && errno != EINTR)) {
          pid_ = -1;
          break;
        }
        if (std::chrono::steady_clock::now() >= until) break;
        ::usleep(2000);
      }
    }
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
      }
    }
  }
  pid_ = -1;
  close_fd(to_child_);
  close_fd(from_child_);
  return status;
}

void ExternalAdapter::stop() {
  if (pid_ > 0) reap(false);
  close_fd(to_child_);
  close_fd(from_child_);
  buffer_.clear();
}

std::string ExternalAdapter::request(std::string_view line) {
  if (pid_ < 0) start();
  std::string payload(line);
  for (char& c : payload) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  payload += '\n';

  if (!write_all(to_child_, payload)) {
    const std::string raw = buffer_;
    const int status = reap(true);
    last_response_ = raw;
    throw AdapterError(ErrorCode::kAdapterCrashed,
                       "adapter " + describe_status(status) +
                           " before reading the request",
                       raw);
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string response = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!response.empty() && response.back() == '\r') response.pop_back();
      last_response_ = response;
      return response;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      last_response_ = buffer_;
      stop();
      throw AdapterError(ErrorCode::kAdapterTimeout,
                         "adapter gave no response within " +
                             std::to_string(timeout_.count()) + " ms",
                         last_response_);
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) {
      last_response_ = buffer_;
      buffer_.clear();
      const int status = reap(true);
      throw AdapterError(ErrorCode::kAdapterCrashed,
                         "adapter " + describe_status(status) +
                             " without a response",
                         last_response_);
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

sg::SceneGraph ExternalAdapter::convert_text(std::string_view linearized) {
  std::string response = request(linearized);
  try {
    return sg::parse_sg_text(response);
  } catch (const Error& e) {
    throw AdapterError(ErrorCode::kMalformedModelOutput,
                       std::string("model output rejected: ") + e.what(),
                       std::move(response));
  }
}

sg::SceneGraph ExternalAdapter::convert(const linearize::Sequence& seq) {
  return convert_text(seq.text);
}

}  // namespace sgram::amr2sg
