#include <atomic>
#include <cstdlib>
#include <string>

#include "densemem/error.hpp"
#include "densemem/simd/kernels.hpp"

namespace densemem::simd {
namespace {

Backend detect() {
  if (const char* env = std::getenv("DENSEMEM_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return Backend::kScalar;
    if (choice == "avx2" && cpu_supports_avx2()) return Backend::kAvx2;
  }
  return cpu_supports_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

bool cpu_supports_avx2() {
#if (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") &&
                                __builtin_cpu_supports("fma");
  return supported;
#else
  return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (backend == Backend::kAvx2 && !cpu_supports_avx2()) {
    throw InvalidArgument("AVX2 kernels are not available on this machine");
  }
  current().store(backend, std::memory_order_relaxed);
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

const KernelTable& kernels() {
  if (active_backend() == Backend::kAvx2) return *avx2_kernels();
  return scalar_kernels();
}

}  // namespace densemem::simd
