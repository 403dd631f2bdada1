#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hamcenter/field.hpp"

namespace hamcenter {

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Built-in maps: example1, example2, example3, identity, control_noninjective,
/// and (only with `include_extended`) pinchuk200.
std::vector<PlanarMap> builtin_corpus(bool include_extended = false);

/// Throws InputError for unknown names, or for pinchuk200 when not enabled.
PlanarMap builtin_map(std::string_view name, bool include_extended = false);

/// Parses a map-spec document:
///   name = "example1"
///   f1 = "exp(x) - 1"
///   f2 = "y"
///   domain = "plane"            # or "box(-4, 4, -4, 4)"
///   hamiltonian = "<expr>"      # optional; must be polynomial and validate
PlanarMap parse_map_spec(std::string_view text);
PlanarMap load_map_spec(const std::string& path);

/// "builtin:NAME" or a file path.
PlanarMap resolve_map(const std::string& source, bool include_extended = false);

/// Serialises a map back to map-spec form.
std::string write_map_spec(const PlanarMap& map);

}  // namespace hamcenter
