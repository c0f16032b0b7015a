// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sonneteer {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LoadError : public Error {
 public:
  using Error::Error;
};
class ParseError : public Error {
 public:
  using Error::Error;
};
class LookupError : public Error {
 public:
  using Error::Error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class TrainingError : public Error {
 public:
  using Error::Error;
};
class SamplingError : public Error {
 public:
  using Error::Error;
};
class PlannerError : public Error {
 public:
  using Error::Error;
};
class AssignmentError : public Error {
 public:
  using Error::Error;
};
class LineError : public Error {
 public:
  using Error::Error;
};
class SonnetError : public Error {
 public:
  using Error::Error;
};
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Deterministic random source. All randomness in the library flows through
/// this class; the std::*_distribution adaptors are avoided on purpose because
/// their output is implementation-defined, which would break the contract
/// that a fixed seed reproduces outputs bit-exactly.
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be > 0.
  size_t uniform(size_t n) { return static_cast<size_t>(eng_() % n); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace sonneteer
