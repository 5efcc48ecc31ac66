#pragma once

namespace detbench {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kResultsSchema = "detbench-results/1";

}  // namespace detbench
