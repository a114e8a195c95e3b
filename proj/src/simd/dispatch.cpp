#include <atomic>

#include "enkf_lab/simd/kernels.hpp"

namespace enkf_lab::simd {

namespace {

std::atomic<const KernelTable*>& active() {
    static std::atomic<const KernelTable*> table{avx2_kernels() ? avx2_kernels() : &scalar_kernels()};
    return table;
}

}  // namespace

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

bool select_isa(Isa isa) {
    const KernelTable* table = isa == Isa::avx2 ? avx2_kernels() : &scalar_kernels();
    if (table == nullptr) return false;
    active().store(table, std::memory_order_release);
    return true;
}

Isa active_isa() { return &kernels() == &scalar_kernels() ? Isa::scalar : Isa::avx2; }

}  // namespace enkf_lab::simd
