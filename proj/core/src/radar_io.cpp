#include "asv/radar_io.hpp"

#include <png.h>
#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

#include <fmt/format.h>

namespace asv {

namespace {

std::vector<std::uint8_t> north_up_gray(const RadarFrame& f) {
  std::vector<std::uint8_t> out(f.pixels.size());
  const auto g = static_cast<std::size_t>(f.size);
  for (std::size_t row = 0; row < g; ++row) {
    const std::size_t y = g - 1 - row;
    for (std::size_t x = 0; x < g; ++x) out[row * g + x] = f.pixels[y * g + x] ? 255 : 0;
  }
  return out;
}

}  // namespace

void write_pgm(const RadarFrame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("io", fmt::format("cannot write '{}'", path.string()));
  out << "P5\n" << frame.size << " " << frame.size << "\n255\n";
  const auto gray = north_up_gray(frame);
  out.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
  if (!out) throw RuntimeFailure("io", fmt::format("failed writing '{}'", path.string()));
}

void write_png(const RadarFrame& frame, const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw RuntimeFailure("io", fmt::format("cannot write '{}'", path.string()));

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw RuntimeFailure("io", "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw RuntimeFailure("io", fmt::format("libpng failed writing '{}'", path.string()));
  }
  const auto gray = north_up_gray(frame);
  const auto g = static_cast<png_uint_32>(frame.size);
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, g, g, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (png_uint_32 row = 0; row < g; ++row) {
    png_write_row(png, gray.data() + static_cast<std::size_t>(row) * g);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::string frame_metadata(const RadarFrame& frame, const RadarConfig& config) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "timestamp" << YAML::Value << frame.timestamp;
  out << YAML::Key << "image_size" << YAML::Value << frame.size;
  out << YAML::Key << "extent_min" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << frame.extent.min.x << frame.extent.min.y << YAML::EndSeq;
  out << YAML::Key << "extent_span" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << frame.extent.span.x << frame.extent.span.y << YAML::EndSeq;
  out << YAML::Key << "radar_pixel" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << frame.radar_pixel.x << frame.radar_pixel.y << YAML::EndSeq;
  out << YAML::Key << "orientation" << YAML::Value << "north-up";
  out << YAML::Key << "config" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "alpha" << YAML::Value << config.alpha;
  out << YAML::Key << "beta" << YAML::Value << config.beta;
  out << YAML::Key << "max_range" << YAML::Value << config.max_range;
  out << YAML::Key << "rotation_rpm" << YAML::Value << config.rotation_rpm;
  out << YAML::Key << "extent_mode" << YAML::Value
      << (config.extent_mode == ExtentMode::fixed_metric ? "fixed-metric" : "paper-normalized");
  out << YAML::EndMap << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void write_metadata(const RadarFrame& frame, const RadarConfig& config,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("io", fmt::format("cannot write '{}'", path.string()));
  out << frame_metadata(frame, config);
}

}  // namespace asv
