#pragma once

// Generators shared by the unit and acceptance suites.

#include <functional>
#include <string>
#include <vector>

#include "projed/match.hpp"
#include "support.hpp"

namespace testing {

// Every assignment of run lengths to the shape, fixed elements taking exactly
// one child, listed in lexicographic order of the lengths.
inline std::vector<Split> brute_force_splits(std::size_t n, const std::vector<bool>& shape) {
  std::vector<Split> out;
  std::vector<std::size_t> len(shape.size(), 0);
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == shape.size()) {
      std::size_t sum = 0;
      for (auto l : len) sum += l;
      if (sum != n) return;
      Split s;
      std::size_t at = 0;
      for (auto l : len) {
        s.push_back({at, at + l});
        at += l;
      }
      out.push_back(s);
      return;
    }
    for (std::size_t l = 0; l <= n; ++l) {
      if (!shape[i] && l != 1) continue;
      len[i] = l;
      go(i + 1);
    }
  };
  go(0);
  return out;
}

// Random rule sets over a small signature. Bodies use only variables bound
// by their pattern, so evaluation never fails.
struct RuleGen {
  Rng& rng;
  std::vector<std::string> singles, segments;

  std::string functor() { return rng.pick(std::vector<std::string>{"f", "g", "h"}); }

  std::string pattern(int depth) {
    std::string out = "(" + functor();
    int n = rng.below(3);
    bool seg = false;
    for (int i = 0; i < n; ++i) {
      int roll = rng.below(10);
      if (roll < 4) {
        std::string v = "v" + std::to_string(singles.size() + segments.size());
        singles.push_back(v);
        out += " " + v;
      } else if (roll < 5) {
        out += " _";
      } else if (roll < 7) {
        out += " " + std::to_string(rng.below(2));
      } else if (roll < 8 && !seg) {
        seg = true;
        std::string v = "s" + std::to_string(singles.size() + segments.size());
        segments.push_back(v);
        out += " " + v + " ...";
      } else if (depth > 0) {
        out += " " + pattern(depth - 1);
      } else {
        out += " _";
      }
    }
    return out + ")";
  }

  std::string body(int depth) {
    int roll = rng.below(10);
    if (roll < 3 && !singles.empty()) return rng.pick(singles);
    if (roll < 4 || depth == 0) return std::to_string(rng.below(3));
    std::string out = "(" + rng.pick(std::vector<std::string>{"f", "g", "h", "k"});
    int n = rng.below(3);
    for (int i = 0; i < n; ++i) {
      if (!segments.empty() && rng.chance(25)) {
        out += " " + rng.pick(segments) + " ...";
      } else {
        out += " " + body(depth - 1);
      }
    }
    return out + ")";
  }

  std::string rule() {
    singles.clear();
    segments.clear();
    std::string p = pattern(1);
    return "[" + p + " " + body(2) + "]";
  }
};

inline std::string random_tree(Rng& rng, int depth) {
  if (depth == 0 || rng.chance(25)) return std::to_string(rng.below(3));
  std::string out = "(" + rng.pick(std::vector<std::string>{"f", "g", "h", "k"});
  int n = rng.below(4);
  for (int i = 0; i < n; ++i) out += " " + random_tree(rng, depth - 1);
  return out + ")";
}


}  // namespace testing
