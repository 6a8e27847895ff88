#pragma once

namespace leafvgg {

/// Worker threads used by the kernels. Values < 1 restore the runtime default.
/// Kernels only split work across output elements, so results do not depend
/// on this setting.
void set_thread_count(int threads);
int thread_count();

}  // namespace leafvgg
