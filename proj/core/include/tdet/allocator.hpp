#pragma once

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace tdet {

/// Training allocates and frees many mid-sized activations per sample; with
/// glibc defaults every free shrinks the heap and the next sample page-faults
/// it back in. Keeping freed memory in the process avoids that churn. No-op
/// on other C libraries.
inline void retain_freed_heap_memory() {
#if defined(__GLIBC__)
  mallopt(M_TOP_PAD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
}

}  // namespace tdet
