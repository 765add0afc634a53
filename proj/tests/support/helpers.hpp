#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <unistd.h>

#include "dairy/config.hpp"
#include "dairy/gateway.hpp"

namespace support {

inline std::filesystem::path source_dir() { return DAIRY_SOURCE_DIR; }
inline std::filesystem::path data_path(const std::string& rel) { return source_dir() / "data" / rel; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> n{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("dairy-test-" + std::to_string(::getpid()) + "-" + std::to_string(stamp) + "-" + std::to_string(n++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

// Defaults over the checked-in fixtures; writable state goes under `scratch`, traces stay in
// memory unless `persist_traces`.
inline dairy::SystemConfig fixture_config(const std::filesystem::path& scratch, bool persist_traces = false) {
  auto c = dairy::SystemConfig::defaults(source_dir());
  c.sql_store = scratch / "milk_data.sqlite";
  c.trace_dir = persist_traces ? scratch / "traces" : std::filesystem::path();
  return c;
}

inline dairy::MockScript benchmark_script() { return dairy::MockScript::load(data_path("mock/benchmark.json")); }

inline std::shared_ptr<dairy::MockChatBackend> benchmark_mock() {
  return std::make_shared<dairy::MockChatBackend>(benchmark_script());
}

// A benchmark script with extra entries taking precedence at equal or longer match lengths.
inline std::shared_ptr<dairy::MockChatBackend> benchmark_mock_with(const std::vector<dairy::MockEntry>& extra) {
  auto s = benchmark_script();
  std::vector<dairy::MockEntry> kept;
  for (const auto& e : s.entries) {
    bool shadowed = false;
    for (const auto& x : extra) shadowed = shadowed || (x.purpose == e.purpose && x.match == e.match);
    if (!shadowed) kept.push_back(e);
  }
  kept.insert(kept.end(), extra.begin(), extra.end());
  s.entries = std::move(kept);
  return std::make_shared<dairy::MockChatBackend>(std::move(s));
}

}  // namespace support
