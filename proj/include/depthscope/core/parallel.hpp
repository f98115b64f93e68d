#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace depthscope {

/// Worker count: DEPTHSCOPE_THREADS caps it, hardware concurrency is the default.
inline int max_threads() {
    static int cached = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw < 1) hw = 1;
        if (const char* env = std::getenv("DEPTHSCOPE_THREADS")) {
            int cap = std::atoi(env);
            if (cap >= 1) hw = std::min(hw, cap);
        }
        return hw;
    }();
    return cached;
}

/// Applies the cap to the OpenMP runtime. Call once at program start.
inline void configure_threads() {
#ifdef _OPENMP
    omp_set_num_threads(max_threads());
#endif
}

}  // namespace depthscope
