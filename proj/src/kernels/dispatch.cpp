#include <atomic>
#include <cstdlib>
#include <string>

#include "gdm/error.hpp"
#include "gdm/kernels.hpp"

namespace gdm::kernels {

const Table* avx2_table_ptr();

namespace {

std::atomic<const Table*> selected{nullptr};

const Table* detect() {
  const char* env = std::getenv("GDM_SIMD");
  if (env != nullptr) {
    std::string want(env);
    if (want == "scalar") return &scalar_table();
    if (want == "avx2" && avx2_available()) return avx2_table_ptr();
  }
  if (avx2_available()) return avx2_table_ptr();
  return &scalar_table();
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  static const bool ok = avx2_table_ptr() != nullptr && __builtin_cpu_supports("avx2");
  return ok;
#else
  return false;
#endif
}

const Table& avx2_table() {
  if (!avx2_available()) throw Error(ErrorKind::Domain, "AVX2 kernels unavailable on this machine");
  return *avx2_table_ptr();
}

const Table& active() {
  const Table* t = selected.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = detect();
    selected.store(t, std::memory_order_release);
  }
  return *t;
}

void force(Isa isa) {
  selected.store(isa == Isa::Avx2 ? &avx2_table() : &scalar_table(), std::memory_order_release);
}

void reset_selection() { selected.store(nullptr, std::memory_order_release); }

}  // namespace gdm::kernels
