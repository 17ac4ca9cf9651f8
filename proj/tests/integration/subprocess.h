// Copyright 2026 The Authors.
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

// Running the command-line binaries from tests.

#ifndef CFSTREAM_TESTS_INTEGRATION_SUBPROCESS_H_
#define CFSTREAM_TESTS_INTEGRATION_SUBPROCESS_H_

#include <sys/types.h>

#include <filesystem>
#include <string>
#include <vector>

namespace cfstream::testing {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs argv[0] with the remaining arguments and waits for it.
ProcessResult RunProcess(const std::vector<std::string>& argv);

// A child whose stdout is readable line by line; killed with SIGTERM and
// reaped on destruction.
class ChildProcess {
 public:
  explicit ChildProcess(const std::vector<std::string>& argv);
  ~ChildProcess();
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  // Empty at end of output.
  std::string ReadLine();
  // Sends SIGTERM and returns the exit status.
  int Terminate();

 private:
  pid_t pid_ = -1;
  int fd_ = -1;
  int status_ = -1;
};

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

std::string ReadFile(const std::string& path);

}  // namespace cfstream::testing

#endif  // CFSTREAM_TESTS_INTEGRATION_SUBPROCESS_H_
