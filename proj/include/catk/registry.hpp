#pragma once
// Session registry: every kernel object gets a sequential id, printed as
// [K<id> <Kind>] in diagnostics and in the command-line surface.

#include <mutex>
#include <string>
#include <vector>

namespace catk {

inline std::vector<std::pair<int, std::string>>& registry_entries() {
  static std::vector<std::pair<int, std::string>> entries;
  return entries;
}

inline int registry_enroll(const std::string& kind) {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto& e = registry_entries();
  int id = static_cast<int>(e.size()) + 1;
  e.emplace_back(id, kind);
  return id;
}

inline std::string registry_label(int id) {
  const auto& e = registry_entries();
  if (id >= 1 && id <= static_cast<int>(e.size()))
    return "[K" + std::to_string(id) + " " + e[id - 1].second + "]";
  return "[K? unknown]";
}

}  // namespace catk
