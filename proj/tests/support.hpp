#pragma once

#include <gtest/gtest.h>

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qualprob/errors.hpp"

namespace testing_support {

// Runs `fn` and reports the error code it threw, or nothing.
template <typename Fn>
std::optional<qualprob::ErrorCode> error_of(Fn&& fn) {
  try {
    fn();
  } catch (const qualprob::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#define EXPECT_QP_ERROR(stmt, expected) \
  EXPECT_EQ(testing_support::error_of([&] { (void)(stmt); }), std::optional(expected))

// Small seeded generator shared by the property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t below(std::uint64_t n) { return rng_() % n; }
  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
  bool coin() { return below(2) == 0; }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testing_support
