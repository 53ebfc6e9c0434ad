#include "deepbalance/kernels.hpp"

namespace deepbalance::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance_scalar(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = x[i] - y[i];
    sum += diff * diff;
  }
  return sum;
}

constexpr KernelTable kScalar{Isa::Scalar, "scalar", &dot_scalar, &axpy_scalar,
                              &squared_distance_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace deepbalance::kernels
