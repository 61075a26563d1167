#pragma once

namespace etdlab {

/// Serial is the reference path; Parallel distributes independent work
/// items over OpenMP threads and must produce identical results.
enum class Execution { Serial, Parallel };

}  // namespace etdlab
