#pragma once

namespace dysonprop {

// Worker cap for node-parallel loops. Initialised from DYSONPROP_THREADS.
int thread_count();
void set_thread_count(int n);

}  // namespace dysonprop
