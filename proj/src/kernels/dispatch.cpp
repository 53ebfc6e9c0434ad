#include <cstdlib>
#include <string_view>

#include "deepbalance/kernels.hpp"

namespace deepbalance::kernels {

namespace detail {
#if !defined(DEEPBALANCE_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif
#if !defined(DEEPBALANCE_HAVE_NEON)
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(DEEPBALANCE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& select_table() {
  const auto tables = available_tables();
  if (const char* env = std::getenv("DEEPBALANCE_SIMD")) {
    const std::string_view wanted(env);
    for (const KernelTable* t : tables) {
      if (wanted == t->name) return *t;
    }
  }
  // Last entry is the widest supported set.
  return *tables.back();
}

}  // namespace

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> tables{&scalar_table()};
  if (const KernelTable* t = detail::avx2_table(); t != nullptr && cpu_has_avx2()) {
    tables.push_back(t);
  }
  // NEON is mandatory on aarch64.
  if (const KernelTable* t = detail::neon_table(); t != nullptr) tables.push_back(t);
  return tables;
}

const KernelTable& active() {
  static const KernelTable& table = select_table();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

}  // namespace deepbalance::kernels
