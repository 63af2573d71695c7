#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stylemetric {

inline constexpr std::string_view kVersion = "0.3.0";

// Base of every error the toolkit raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual std::string_view kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "invalid_argument"; }
};

// Two datasets share no decision context, so a distance is undefined.
// Kept distinct from a distance of 0.
class NoComparableContext : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override {
    return "no_comparable_context";
  }
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  std::string_view kind() const noexcept override { return "parse_error"; }

 private:
  std::size_t line_;
};

// Seeded generator. The engine is std::mt19937_64; the helpers below avoid
// the std distributions so that streams are identical across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller.
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  std::string state() const;
  void restore(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

// Fixed labeled split of one seed into a component seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// Worker count for the parallel kernels. STYLEMETRIC_WORKERS overrides the
// default of available parallelism.
int worker_count();
void set_worker_count(int workers);

}  // namespace stylemetric
