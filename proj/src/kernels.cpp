#include "blockreg/kernels.h"

#include <cstdlib>
#include <string>

namespace blockreg::kernels {

const Kernels* avx2_kernels(); // kernels_avx2.cpp; null when unavailable

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Kernels* best_supported() {
    if (const Kernels* k = avx2_kernels(); k && cpu_has_avx2()) return k;
    return &scalar();
}

const Kernels* initial_choice() {
    if (const char* env = std::getenv("BLOCKREG_KERNELS")) {
        if (const Kernels* k = find(env)) return k;
    }
    return best_supported();
}

const Kernels*& active_slot() {
    static const Kernels* slot = initial_choice();
    return slot;
}

} // namespace

std::vector<const Kernels*> available() {
    std::vector<const Kernels*> out{&scalar()};
    if (const Kernels* k = avx2_kernels(); k && cpu_has_avx2()) out.push_back(k);
    return out;
}

const Kernels* find(std::string_view name) {
    for (const Kernels* k : available()) {
        if (name == k->name) return k;
    }
    return nullptr;
}

const Kernels& active() { return *active_slot(); }

void set_active(const Kernels& k) { active_slot() = &k; }

} // namespace blockreg::kernels
