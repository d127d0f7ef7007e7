#include "stabfold/parallel.hpp"

#include <memory>

#include <tbb/global_control.h>
#include <tbb/info.h>

namespace stabfold {

namespace {
std::unique_ptr<tbb::global_control> g_control;
}

void set_threads(int threads)
{
    if (threads <= 0) {
        g_control.reset();
        return;
    }
    g_control = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                      static_cast<size_t>(threads));
}

int thread_count()
{
    return static_cast<int>(tbb::global_control::active_value(tbb::global_control::max_allowed_parallelism));
}

} // namespace stabfold
