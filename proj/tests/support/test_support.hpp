#pragma once

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace testing_support {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("aerosynth_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// Relative path -> file bytes for every regular file below `root`.
inline std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  }
  return files;
}

/// 64-bit FNV-1a over sorted (path, size, bytes) of every file.
inline std::uint64_t tree_hash(const fs::path& root) {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [name, bytes] : tree_contents(root)) {
    feed(name);
    feed(std::to_string(bytes.size()));
    feed(bytes);
  }
  return h;
}

/// Largest-remainder apportionment written independently of the library:
/// quotas in long double, floors, then +1 in order of descending fractional
/// part (ties to the earlier entry).
inline std::vector<long long> hamilton(const std::vector<long long>& weights, long long total) {
  long double sum = 0;
  for (auto w : weights) sum += w;
  std::vector<long long> out(weights.size(), 0);
  if (sum == 0) return out;
  std::vector<std::pair<long double, std::size_t>> rema;
  long long given = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const long double quota = static_cast<long double>(weights[i]) * total / sum;
    out[i] = static_cast<long long>(quota);
    given += out[i];
    rema.push_back({quota - out[i], i});
  }
  std::stable_sort(rema.begin(), rema.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (long long k = 0; k < total - given; ++k) ++out[rema[static_cast<std::size_t>(k)].second];
  return out;
}

}  // namespace testing_support
