#pragma once

namespace sysrate {

// Kernels that loop over independent trials or grid points take an
// Execution argument. `serial` is the reference path the tests compare
// the OpenMP path against; both must produce bit-identical results.
enum class Execution { serial, parallel };

int max_threads() noexcept;

}  // namespace sysrate
