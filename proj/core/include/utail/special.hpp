// special.hpp
//
// Log-space numeric helpers shared across the library. Probabilities are
// carried as natural logs wherever they can underflow; exp() is applied only
// behind the 700-ish double exponent guard.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace utail {

// Largest magnitude we allow as an exp() argument before clamping.
inline constexpr double exp_arg_guard = 700.0;

// exp(x) with underflow-to-zero and a hard error margin against overflow
// handled by the caller keeping x <= exp_arg_guard.
double safe_exp(double x);

// log C(n, m) via lgamma.
double log_binom(std::uint64_t n, std::uint64_t m);

// C(n, m) as a double (+inf if it overflows).
double binom(std::uint64_t n, std::uint64_t m);

// log(exp(a) + exp(b)) without intermediate overflow; handles -inf.
double logaddexp(double a, double b);
double logsumexp(const std::vector<double>& xs);

// log(1 - exp(x)) for x < 0.
double log1mexp(double x);

// Standard normal: survival function, its log (stable for |z| up to 1e8),
// and the quantile function.
double normal_sf(double z);
double log_normal_sf(double z);
double normal_quantile(double p);

// Shortest round-trip decimal representation (std::to_chars).
std::string to_shortest_string(double x);

// Compensated accumulator for fixed-order reductions.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
  // Merge another partial sum; order of merges must be fixed by the caller.
  void merge(const KahanSum& other) {
    add(other.sum);
    add(-other.carry);
  }
};

}  // namespace utail
