#pragma once

namespace sarcs {

/// Sets the worker count for all internal parallel loops (0: runtime default).
/// Results never depend on this value.
void set_thread_count(int threads);
int thread_count();

}  // namespace sarcs
