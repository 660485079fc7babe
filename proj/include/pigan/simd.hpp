#pragma once

// Data-parallel inner loops used by the dense network code, the optimizer
// and the distance-based attacks. Every kernel has a scalar reference
// implementation and an AVX2+FMA variant; the active table is selected at
// runtime from CPU capabilities and can be forced for equivalence testing.

#include <cstddef>
#include <string>

namespace pigan::simd {

enum class Level {
  scalar,
  avx2,
};

struct Kernels {
  // sum of x[0..n)
  double (*sum)(const double* x, std::size_t n);
  // dot product of x and y
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // sum of (x[i] - y[i])^2
  double (*squared_distance)(const double* x, const double* y, std::size_t n);
  // out[i] = x[i] > 0 ? x[i] : slope * x[i]
  void (*leaky_relu)(const double* x, double* out, std::size_t n, double slope);
  // gin[i] = gout[i] * (pre[i] > 0 ? 1 : slope)
  void (*leaky_relu_grad)(const double* pre, const double* gout, double* gin,
                          std::size_t n, double slope);
  // Adam moment and parameter update with external bias corrections:
  //   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g*g
  //   p -= lr * (m*bc1) / (sqrt(v*bc2) + eps)
  void (*adam_step)(double* p, double* m, double* v, const double* g,
                    std::size_t n, double lr, double b1, double b2, double bc1,
                    double bc2, double eps);
};

// Best level supported by this CPU.
Level detect_level();

// Table currently in effect (detected on first use unless forced).
Level active_level();
const Kernels& active();

// Force a specific table; used by the equivalence tests and the
// PIGAN_SIMD=scalar|avx2 environment override.
void force_level(Level level);

// Explicit table lookup, independent of the active selection.
const Kernels& kernels_for(Level level);

std::string to_string(Level level);

}  // namespace pigan::simd
