// Copyright 2026 The csner Authors.
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

#ifndef CSNER_TESTS_COMMON_CLI_H_
#define CSNER_TESTS_COMMON_CLI_H_

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace csner::testing {

inline std::string Slurp(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void Spit(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("csner-" + std::to_string(::getpid()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  std::string operator/(const std::string &name) const { return (path_ / name).string(); }
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the csner binary through the shell with `args` appended verbatim.
inline CliResult RunCli(const TempDir &dir, const std::string &args) {
  const std::string out = dir / "cli.stdout";
  const std::string err = dir / "cli.stderr";
  const std::string command =
      std::string("'") + CSNER_CLI + "' " + args + " >'" + out + "' 2>'" + err + "'";
  const int status = std::system(command.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = Slurp(out);
  r.err = Slurp(err);
  return r;
}

// `csner serve` in the background; the port is read from its stderr.
class CliServer {
 public:
  CliServer(const TempDir &dir, const std::string &args) {
    const std::string log = dir / "serve.stderr";
    std::filesystem::remove(log);
    const std::string command = std::string("'") + CSNER_CLI + "' serve --port 0 " + args +
                                " 2>'" + log + "' >/dev/null & echo $!";
    FILE *pipe = ::popen(command.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("popen failed");
    if (std::fscanf(pipe, "%d", &pid_) != 1) pid_ = -1;
    ::pclose(pipe);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(30);
    while (std::chrono::steady_clock::now() < deadline) {
      const std::string text = Slurp(log);
      const auto at = text.find("listening on ");
      const auto colon = text.find(':', at == std::string::npos ? 0 : at);
      if (at != std::string::npos && colon != std::string::npos &&
          text.find('\n', colon) != std::string::npos) {
        port_ = std::atoi(text.c_str() + colon + 1);
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }
  ~CliServer() {
    if (pid_ > 0) ::kill(pid_, SIGTERM);
  }
  CliServer(const CliServer &) = delete;
  CliServer &operator=(const CliServer &) = delete;

  int port() const { return port_; }

 private:
  int pid_ = -1;
  int port_ = -1;
};

}  // namespace csner::testing

#endif  // CSNER_TESTS_COMMON_CLI_H_
