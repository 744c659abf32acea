#pragma once

#include <vector>

namespace pertprop::detail {

/// All integer compositions of n into parts >= 1, e.g. 3 -> {(1,1,1), (1,2),
/// (2,1), (3)}. There are 2^{n-1} of them; callers keep n small (<= 6).
inline std::vector<std::vector<int>> integer_compositions(int n) {
  std::vector<std::vector<int>> out;
  if (n <= 0) return out;
  std::vector<int> current;
  auto recurse = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      out.push_back(current);
      return;
    }
    for (int part = 1; part <= remaining; ++part) {
      current.push_back(part);
      self(self, remaining - part);
      current.pop_back();
    }
  };
  recurse(recurse, n);
  return out;
}

}  // namespace pertprop::detail
