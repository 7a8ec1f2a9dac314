#pragma once

#include <algorithm>
#include <chrono>
#include <csignal>
#include <cstring>
#include <map>
#include <string>
#include <utility>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "simplegate/common.hpp"

namespace simplegate {

struct ExecResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;
};

namespace detail {

inline void ensure_sigpipe_ignored() {
  // A dying engine must surface as a write error, not kill the pipeline.
  static const bool done = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

struct Pipe {
  int fds[2] = {-1, -1};
  Pipe() {
    if (::pipe(fds) != 0) throw EngineError("pipe() failed");
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  void close_read() {
    if (fds[0] >= 0) ::close(fds[0]), fds[0] = -1;
  }
  void close_write() {
    if (fds[1] >= 0) ::close(fds[1]), fds[1] = -1;
  }
};

}  // namespace detail

// Runs `cmd` through /bin/sh, feeding `input` on stdin and collecting
// stdout/stderr until EOF or the timeout, at which point the child is
// killed and `timed_out` set.
inline ExecResult run_line_command(const std::string& cmd, const std::string& input,
                                   double timeout_s) {
  detail::ensure_sigpipe_ignored();
  detail::Pipe in_pipe, out_pipe, err_pipe;

  pid_t pid = ::fork();
  if (pid < 0) throw EngineError("fork() failed");
  if (pid == 0) {
    ::dup2(in_pipe.fds[0], STDIN_FILENO);
    ::dup2(out_pipe.fds[1], STDOUT_FILENO);
    ::dup2(err_pipe.fds[1], STDERR_FILENO);
    in_pipe.close_read();
    in_pipe.close_write();
    out_pipe.close_read();
    out_pipe.close_write();
    err_pipe.close_read();
    err_pipe.close_write();
    ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }

  in_pipe.close_read();
  out_pipe.close_write();
  err_pipe.close_write();

  // Input is a single line in practice; a partial write to a dead child
  // is reported through the exit-status path below.
  std::size_t written = 0;
  while (written < input.size()) {
    ssize_t k = ::write(in_pipe.fds[1], input.data() + written, input.size() - written);
    if (k <= 0) break;
    written += static_cast<std::size_t>(k);
  }
  in_pipe.close_write();

  ExecResult result;
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(timeout_s));
  bool out_eof = false, err_eof = false;
  char buf[4096];
  while (!out_eof || !err_eof) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                         deadline - std::chrono::steady_clock::now())
                         .count();
    if (remaining <= 0) {
      result.timed_out = true;
      break;
    }
    struct pollfd fds[2];
    nfds_t nfds = 0;
    if (!out_eof) fds[nfds++] = {out_pipe.fds[0], POLLIN, 0};
    if (!err_eof) fds[nfds++] = {err_pipe.fds[0], POLLIN, 0};
    int rc = ::poll(fds, nfds, static_cast<int>(std::min<long long>(remaining, 1000)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (nfds_t i = 0; i < nfds; ++i) {
      if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      bool is_out = fds[i].fd == out_pipe.fds[0];
      ssize_t k = ::read(fds[i].fd, buf, sizeof(buf));
      if (k > 0)
        (is_out ? result.out : result.err).append(buf, static_cast<std::size_t>(k));
      else
        (is_out ? out_eof : err_eof) = true;
    }
  }

  if (result.timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (true) {
    pid_t r = ::waitpid(pid, &status, result.timed_out ? 0 : WNOHANG);
    if (r == pid || r < 0) break;
    if (std::chrono::steady_clock::now() > deadline) {
      ::kill(pid, SIGKILL);
      result.timed_out = true;
      ::waitpid(pid, &status, 0);
      break;
    }
    ::usleep(2000);
  }
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.exit_code = 128 + WTERMSIG(status);
  return result;
}

// Simplification engine behind a line protocol: one sentence in on
// stdin, exactly one line out on stdout. The mock variant is a lookup
// table that echoes unmapped input.
class EngineAdapter {
 public:
  static EngineAdapter mock(std::map<std::string, std::string> table = {}) {
    EngineAdapter e;
    e.kind_ = Kind::Mock;
    e.table_ = std::move(table);
    return e;
  }

  static EngineAdapter command(std::string cmd, double timeout_s = 30.0) {
    EngineAdapter e;
    e.kind_ = Kind::Command;
    e.cmd_ = std::move(cmd);
    e.timeout_s_ = timeout_s;
    return e;
  }

  bool is_mock() const { return kind_ == Kind::Mock; }
  const std::string& command_line() const { return cmd_; }
  double timeout_s() const { return timeout_s_; }

  std::string simplify(const std::string& sentence) const {
    if (kind_ == Kind::Mock) {
      auto it = table_.find(sentence);
      return it == table_.end() ? sentence : it->second;
    }
    std::string line = sentence;
    std::replace(line.begin(), line.end(), '\n', ' ');
    ExecResult res = run_line_command(cmd_, line + "\n", timeout_s_);
    if (res.timed_out)
      throw EngineError("engine timed out after " + format_double(timeout_s_) +
                        "s: " + cmd_ + stderr_excerpt(res));
    if (res.exit_code != 0)
      throw EngineError("engine exited with code " + std::to_string(res.exit_code) +
                        stderr_excerpt(res));
    std::string out = res.out;
    if (out.empty())
      throw EngineError("output line count mismatch (0 != 1)" + stderr_excerpt(res));
    if (out.back() == '\n') out.pop_back();
    auto extra = static_cast<long long>(std::count(out.begin(), out.end(), '\n'));
    if (extra > 0)
      throw EngineError("output line count mismatch (" + std::to_string(extra + 1) +
                        " != 1)" + stderr_excerpt(res));
    return out;
  }

 private:
  enum class Kind { Mock, Command };

  static std::string stderr_excerpt(const ExecResult& res) {
    if (res.err.empty()) return "";
    std::string excerpt = res.err.substr(0, 200);
    while (!excerpt.empty() && (excerpt.back() == '\n' || excerpt.back() == '\r'))
      excerpt.pop_back();
    return "; stderr: " + excerpt;
  }

  Kind kind_ = Kind::Mock;
  std::map<std::string, std::string> table_;
  std::string cmd_;
  double timeout_s_ = 30.0;
};

}  // namespace simplegate
