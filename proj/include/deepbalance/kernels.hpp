#pragma once

// Data-parallel inner loops used by the dense linear algebra and the k-NN
// search. Each kernel has a portable scalar reference implementation and,
// where the target supports it, an AVX2 (x86-64) or NEON (aarch64) variant.
// The variant is chosen once at runtime from CPU feature detection; the
// DEEPBALANCE_SIMD environment variable ("scalar", "avx2", "neon") overrides
// the choice when the requested set is available.
//
// Elementwise kernels (axpy, scale) are bitwise identical across variants:
// the SIMD versions use separate multiply and add, never fused. Reductions
// (dot, squared_distance) reassociate the sum across lanes and agree with the
// scalar reference to within a few ulps of the magnitude of the terms.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace deepbalance::kernels {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  const char* name;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // sum_i (x[i] - y[i])^2
  double (*squared_distance)(const double* x, const double* y, std::size_t n);
};

const KernelTable& scalar_table();

// Tables compiled into this binary whose instruction set the running CPU
// supports. Always contains the scalar table first.
std::vector<const KernelTable*> available_tables();

// The table selected for this process.
const KernelTable& active();

std::string_view isa_name(Isa isa);

// Convenience wrappers over active().
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double squared_distance(std::span<const double> x, std::span<const double> y) {
  return active().squared_distance(x.data(), y.data(), x.size());
}

namespace detail {
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();
}  // namespace detail

}  // namespace deepbalance::kernels
