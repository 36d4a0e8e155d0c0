// Copyright 2026 The Software Assembly Line Authors. All Rights Reserved.
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

#include "sal/runner.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

extern char** environ;

namespace sal {

namespace {

std::string joined_path(const std::vector<std::filesystem::path>& search_path) {
  std::string value;
  for (const auto& dir : search_path) {
    if (!value.empty()) value += ':';
    value += std::filesystem::absolute(dir).string();
  }
  const char* inherited = std::getenv("PATH");
  std::string rest = inherited ? inherited : "/usr/local/bin:/usr/bin:/bin";
  if (!rest.empty()) {
    if (!value.empty()) value += ':';
    value += rest;
  }
  return value;
}

bool is_executable(const std::filesystem::path& p) {
  std::error_code ec;
  return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

}  // namespace

CommandOutcome ShellRunner::run(const CommandRequest& request) {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    return {127, std::string("pipe: ") + std::strerror(errno)};
  }
  // Everything the child touches is prepared before fork; it must not allocate.
  std::vector<std::string> env_storage;
  env_storage.push_back("PATH=" + joined_path(request.search_path));
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    if (std::strncmp(*e, "PATH=", 5) != 0) env_storage.emplace_back(*e);
  }
  std::vector<char*> envp;
  for (auto& entry : env_storage) envp.push_back(entry.data());
  envp.push_back(nullptr);
  std::string cwd = request.cwd.string();

  pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    return {127, std::string("fork: ") + std::strerror(errno)};
  }
  if (pid == 0) {
    ::dup2(fds[1], STDOUT_FILENO);
    ::dup2(fds[1], STDERR_FILENO);
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) _exit(126);
    const char* argv[] = {"sh", "-c", request.command.c_str(), nullptr};
    ::execve("/bin/sh", const_cast<char* const*>(argv), envp.data());
    _exit(127);
  }

  ::close(fds[1]);
  CommandOutcome outcome;
  char buf[4096];
  for (;;) {
    auto n = ::read(fds[0], buf, sizeof buf);
    if (n > 0) {
      outcome.output.append(buf, static_cast<std::size_t>(n));
    } else if (n < 0 && errno == EINTR) {
      continue;
    } else {
      break;
    }
  }
  ::close(fds[0]);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) {
    outcome.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    outcome.exit_code = 128 + WTERMSIG(status);
  } else {
    outcome.exit_code = 1;
  }
  return outcome;
}

std::filesystem::path resolve_executable(const std::string& name,
                                         const std::filesystem::path& cwd,
                                         const std::vector<std::filesystem::path>& search_path) {
  if (name.find('/') != std::string::npos) {
    std::filesystem::path p(name);
    if (p.is_relative()) p = cwd / p;
    return is_executable(p) ? p.lexically_normal() : std::filesystem::path{};
  }
  for (const auto& dir : search_path) {
    auto candidate = std::filesystem::absolute(dir) / name;
    if (is_executable(candidate)) return candidate.lexically_normal();
  }
  const char* env = std::getenv("PATH");
  std::string_view rest = env ? env : "/usr/local/bin:/usr/bin:/bin";
  while (!rest.empty()) {
    auto colon = rest.find(':');
    auto dir = rest.substr(0, colon);
    if (!dir.empty()) {
      auto candidate = std::filesystem::path(dir) / name;
      if (is_executable(candidate)) return candidate.lexically_normal();
    }
    if (colon == std::string_view::npos) break;
    rest.remove_prefix(colon + 1);
  }
  return {};
}

}  // namespace sal
