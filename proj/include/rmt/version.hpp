#pragma once

namespace rmt {

// Version stamped into every result file. Bump when the output schema or any
// numeric contract changes.
inline constexpr const char* kArtifactVersion = "0.1.0";

// Name of the pseudo-random generator, recorded in result metadata so output
// files identify the exact stream algorithm that produced them.
inline constexpr const char* kRngName = "philox4x32-10";

}  // namespace rmt
