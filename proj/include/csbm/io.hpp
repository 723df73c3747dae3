#pragma once

#include <json.hpp>

#include <string>
#include <variant>

#include "csbm/model.hpp"

namespace csbm {

enum class Format { kJson, kBinary };

/// Parses "json" or "bin"; throws ConfigError otherwise.
Format parse_format(const std::string& name);

using AnyInstance = std::variant<Instance, GaussianInstance>;

nlohmann::json params_to_json(const ModelParams& params);
ModelParams params_from_json(const nlohmann::json& j);

/// JSON container: {"format": "csbm-instance", "version": 1, "kind",
/// "params", "seed", "v", "u", "covariates" (p x n, row-major), and "edges"
/// (sorted i < j pairs) or "matrix_a" (row-major)}.
nlohmann::json to_json(const AnyInstance& inst);
AnyInstance from_json(const nlohmann::json& j);

/// Binary container: "CSBM", u32 version, u64 header length, the JSON
/// header (everything but the arrays), then little-endian arrays in the
/// order edges (i32 pairs) or matrix_a (f64), covariates (f64 row-major),
/// v (i8), u (f64).
std::string encode_binary(const AnyInstance& inst);
AnyInstance decode_binary(const std::string& bytes);

void write_instance(const std::string& path, const AnyInstance& inst, Format format);

/// Detects the container from its first bytes.
AnyInstance read_instance(const std::string& path);

}  // namespace csbm
