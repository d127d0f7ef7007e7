#pragma once

#include <cstddef>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

namespace stabfold {

// Caps the worker pool for the rest of the process; 0 keeps the default.
void set_threads(int threads);
int thread_count();

template <class Body>
void parallel_for(size_t count, Body&& body)
{
    tbb::parallel_for(tbb::blocked_range<size_t>(0, count), [&](const tbb::blocked_range<size_t>& r) {
        for (size_t k = r.begin(); k != r.end(); ++k) body(k);
    });
}

} // namespace stabfold
