#include "gridflow/policies.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace gridflow {

ProcessPolicy::ProcessPolicy(std::string command) : command_(std::move(command)) {
  std::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0 || pipe2(out_pipe, O_CLOEXEC) != 0)
    throw ProtocolViolation(std::string("pipe: ") + std::strerror(errno));
  pid_ = fork();
  if (pid_ < 0) throw ProtocolViolation(std::string("fork: ") + std::strerror(errno));
  if (pid_ == 0) {
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid_, pid_);
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ProcessPolicy::~ProcessPolicy() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    // wait up to 0.5 s for a clean exit, then take down the whole group
    siginfo_t info{};
    for (int i = 0; i < 50; ++i) {
      info.si_pid = 0;
      if (waitid(P_PID, static_cast<id_t>(pid_), &info, WEXITED | WNOHANG | WNOWAIT) == 0 && info.si_pid == pid_) break;
      usleep(10000);
    }
    kill(-pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
  }
}

void ProcessPolicy::send(const Json& message) {
  const std::string line = message.dump() + "\n";
  std::size_t done = 0;
  while (done < line.size()) {
    const ssize_t n = write(to_child_, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolViolation("policy process closed its input: " + std::string(std::strerror(errno)));
    }
    done += static_cast<std::size_t>(n);
  }
}

std::string ProcessPolicy::read_line(std::chrono::milliseconds timeout) {
  using Clock = std::chrono::steady_clock;
  timeout = std::min(timeout, std::chrono::milliseconds(std::int64_t{1} << 40));
  const auto deadline = Clock::now() + timeout;
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) throw PolicyTimeout("policy did not reply within " + std::to_string(timeout.count()) + " ms");
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(std::min<long long>(left, 1 << 30)));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) continue;
    char chunk[65536];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw ProtocolViolation("policy process exited before replying");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

Json ProcessPolicy::request(const Json& message, std::chrono::milliseconds timeout) {
  send(message);
  const std::string line = read_line(timeout);
  try {
    return Json::parse(line);
  } catch (const Json::exception& e) {
    throw ProtocolViolation("unparseable reply: " + line.substr(0, 200));
  }
}

void ProcessPolicy::notify(const Json& message) {
  try {
    send(message);
  } catch (const ProtocolViolation&) {
    // the policy may exit as soon as the episode is over
  }
}

}  // namespace gridflow
