#pragma once

namespace capcav {

inline constexpr const char* kToolkitVersion = "0.1.0";

} // namespace capcav
