#include "sarcs/parallel.hpp"

#include <omp.h>

namespace sarcs {

void set_thread_count(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
    // Trials already run in parallel; operator loops inside a trial stay serial.
    omp_set_max_active_levels(1);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace sarcs
