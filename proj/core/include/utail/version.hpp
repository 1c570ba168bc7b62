// version.hpp

#pragma once

namespace utail {

inline constexpr const char* version_string = "0.1.0";

// Catalog versions are stamped into run manifests so result files can be
// traced to the exact tail-function and kernel definitions that produced
// them. Bump on any change to closed forms, I constructions, or samplers.
inline constexpr const char* model_catalog_version = "models-1";
inline constexpr const char* kernel_catalog_version = "kernels-1";

}  // namespace utail
