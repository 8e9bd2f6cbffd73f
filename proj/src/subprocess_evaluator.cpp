// Copyright 2026 The Kevo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kevo/subprocess_evaluator.hpp"

#include <fcntl.h>
#include <fmt/core.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <thread>

#include "kevo/protocol.hpp"

namespace kevo {

namespace {

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

}  // namespace

SubprocessEvaluator::SubprocessEvaluator(SubprocessSpec spec) : spec_(std::move(spec)) {
  if (spec_.command.empty()) throw ConfigError("subprocess evaluator needs a command");
  ignore_sigpipe_once();
}

SubprocessEvaluator::~SubprocessEvaluator() { stop(false); }

void SubprocessEvaluator::start() {
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw EvaluatorFault(fmt::format("pipe: {}", std::strerror(errno)));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw EvaluatorFault(fmt::format("pipe: {}", std::strerror(errno)));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw EvaluatorFault(fmt::format("fork: {}", std::strerror(errno)));
  }
  if (pid == 0) {
    // Own process group so a timeout also reaches anything the command spawned.
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    if (!spec_.working_dir.empty() && ::chdir(spec_.working_dir.c_str()) != 0) _exit(126);
    ::signal(SIGPIPE, SIG_DFL);
    ::execl("/bin/sh", "sh", "-c", spec_.command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::setpgid(pid, pid);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();
}

void SubprocessEvaluator::stop(bool force) {
  if (pid_ < 0) return;
  close_fd(to_child_);
  close_fd(from_child_);
  if (force) ::kill(-pid_, SIGKILL);
  // Give a well-behaved child a moment to exit on EOF before killing it.
  int status = 0;
  for (int i = 0; i < 200; ++i) {
    if (::waitpid(pid_, &status, WNOHANG) == pid_) {
      pid_ = -1;
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ::kill(-pid_, SIGKILL);
  ::waitpid(pid_, &status, 0);
  pid_ = -1;
}

std::string SubprocessEvaluator::round_trip(const std::string& line, double timeout_s,
                                            bool* timed_out) {
  *timed_out = false;
  if (pid_ < 0) start();

  std::string msg = line;
  msg.push_back('\n');
  std::size_t written = 0;
  while (written < msg.size()) {
    const ssize_t n = ::write(to_child_, msg.data() + written, msg.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      stop(true);
      throw EvaluatorFault(fmt::format("evaluator '{}' closed its input: {}", spec_.command,
                                       std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(timeout_s));
  while (true) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string reply = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return reply;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      stop(true);
      *timed_out = true;
      return {};
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<std::int64_t>(left.count(), 1000)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      stop(true);
      throw EvaluatorFault(fmt::format("poll: {}", std::strerror(errno)));
    }
    if (ready == 0) continue;
    char chunk[65536];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      stop(true);
      throw EvaluatorFault(fmt::format("read: {}", std::strerror(errno)));
    }
    if (n == 0) {
      stop(true);
      throw EvaluatorFault(fmt::format("evaluator '{}' exited before replying", spec_.command));
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

EvaluationResult SubprocessEvaluator::evaluate(std::string_view code, const Task& task,
                                               const EvalConfig& cfg) {
  if (code.empty()) throw ContractViolation("evaluate needs non-empty code");
  double budget = 0.0;
  if (cfg.runs(Stage::kCompile)) budget += cfg.timeouts.compile_s;
  if (cfg.runs(Stage::kTest)) budget += cfg.timeouts.test_case_s * task.test_spec.n_cases;
  if (cfg.runs(Stage::kTime)) budget += cfg.timeouts.timing_s;

  bool timed_out = false;
  const std::string reply = round_trip(encode_request(code, task, cfg), budget, &timed_out);
  if (timed_out) {
    EvaluationResult r;
    r.error = StageError{"evaluate", "timeout",
                         fmt::format("no reply within {:.1f} s", budget)};
    return r;
  }
  return decode_response(reply);
}

}  // namespace kevo
