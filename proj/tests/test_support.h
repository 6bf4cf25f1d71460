// Copyright 2026 The Proactiva Authors.
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

#ifndef PROACTIVA_TESTS_TEST_SUPPORT_H_
#define PROACTIVA_TESTS_TEST_SUPPORT_H_

#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "proactiva/error.h"
#include "proactiva/types.h"

namespace proactiva::testing {

inline std::string fixture_path(std::string_view rel) {
  return std::string(PROACTIVA_FIXTURES_DIR) + "/" + std::string(rel);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Builds a history from "Driver: ..." / "IVCA: ..." segments. Segments may
// sit on one line, the way exchanges are quoted in prose.
inline DialogueHistory parse_exchange(std::string_view exchange, std::string id = "t") {
  DialogueHistory h(std::move(id));
  const std::string_view labels[] = {"Driver:", "IVCA:"};
  std::size_t pos = 0;
  auto next_label = [&](std::size_t from) {
    std::size_t best = std::string_view::npos;
    for (auto l : labels) best = std::min(best, exchange.find(l, from));
    return best;
  };
  pos = next_label(0);
  while (pos != std::string_view::npos) {
    const bool driver = exchange.substr(pos, 7) == "Driver:";
    const std::size_t body = pos + (driver ? 7 : 5);
    const std::size_t end = next_label(body);
    auto text = exchange.substr(body, end == std::string_view::npos ? end : end - body);
    h = append_turn(h, driver ? Speaker::kUser : Speaker::kAssistant, text);
    pos = end;
  }
  return h;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("proactiva-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace proactiva::testing

#define EXPECT_ERROR_CODE(statement, expected)                                         \
  do {                                                                                 \
    try {                                                                              \
      statement;                                                                       \
      ADD_FAILURE() << "expected " << ::proactiva::error_code_name(expected);          \
    } catch (const ::proactiva::Error& e_) {                                           \
      EXPECT_EQ(e_.code(), expected) << e_.what();                                     \
    }                                                                                  \
  } while (0)

#endif  // PROACTIVA_TESTS_TEST_SUPPORT_H_
