#include "npmix/smoothing/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace npmix::simd {

const KernelTable& avx2_kernel_table();

namespace {

KernelMode initial_mode() {
  const char* env = std::getenv("NPMIX_SIMD");
  if (env == nullptr) return KernelMode::Auto;
  const std::string v(env);
  if (v == "scalar") return KernelMode::Scalar;
  if (v == "avx2") return KernelMode::Avx2;
  return KernelMode::Auto;
}

std::atomic<KernelMode>& mode_slot() {
  static std::atomic<KernelMode> mode{initial_mode()};
  return mode;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

const KernelTable* avx2_kernels() { return cpu_has_avx2() ? &avx2_kernel_table() : nullptr; }

const KernelTable& active_kernels() {
  const KernelMode mode = mode_slot().load(std::memory_order_relaxed);
  if (mode != KernelMode::Scalar && cpu_has_avx2()) return avx2_kernel_table();
  return scalar_kernels();
}

void set_kernel_mode(KernelMode mode) { mode_slot().store(mode, std::memory_order_relaxed); }

KernelMode kernel_mode() { return mode_slot().load(std::memory_order_relaxed); }

}  // namespace npmix::simd
