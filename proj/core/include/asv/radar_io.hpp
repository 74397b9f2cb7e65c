#pragma once

#include <filesystem>
#include <string>

#include "asv/radar.hpp"

namespace asv {

// Images are written north-up: the first image row is raster row y = G - 1.

/// Binary portable graymap (P5), set pixels 255, others 0.
void write_pgm(const RadarFrame& frame, const std::filesystem::path& path);
/// 8-bit grayscale PNG with the same pixel values as write_pgm.
void write_png(const RadarFrame& frame, const std::filesystem::path& path);
/// Key-value metadata sidecar: extent, radar pixel, timestamp and config echo.
std::string frame_metadata(const RadarFrame& frame, const RadarConfig& config);
void write_metadata(const RadarFrame& frame, const RadarConfig& config,
                    const std::filesystem::path& path);

}  // namespace asv
