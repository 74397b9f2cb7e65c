#pragma once

#include <filesystem>
#include <string>

#include "asv/dynamics.hpp"

namespace asv {

/// Parses and validates a vessel parameter document (YAML, SI units, radians).
/// Throws ParseError, AsymmetricMassError, NonSpdMassError or ThrusterBoundsError.
VesselParams load_model(const std::string& document, const std::string& source = "<memory>");
VesselParams load_model_file(const std::filesystem::path& path);

/// Serializes a model back to the document format.
std::string dump_model(const VesselParams& params);

}  // namespace asv
