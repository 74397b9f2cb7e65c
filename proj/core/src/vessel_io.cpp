#include "asv/vessel_io.hpp"

#include <fstream>
#include <sstream>

#include "yaml_util.hpp"

namespace asv {

namespace {

Mat3 read_matrix(const YAML::Node& node, const std::string& field, const std::string& source) {
  if (!node.IsSequence() || node.size() != 3) {
    throw ParseError(fmt::format("{}: field '{}' must be a 3x3 list of rows", detail::where(source, node),
                                 field));
  }
  Mat3 m;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto row = detail::numbers(node[i], 3, field, source);
    for (std::size_t j = 0; j < 3; ++j) m(static_cast<int>(i), static_cast<int>(j)) = row[j];
  }
  return m;
}

}  // namespace

VesselParams load_model(const std::string& document, const std::string& source) {
  const YAML::Node root = detail::parse_yaml(document, source);
  if (!root.IsMap()) throw ParseError(fmt::format("{}: vessel document must be a mapping", source));

  VesselParams p;
  p.name = detail::get<std::string>(root, "name", source);
  p.length = detail::get<double>(root, "length", source);
  p.mass = read_matrix(detail::require(root, "mass", source), "mass", source);
  p.coriolis_mass = root["coriolis_mass"]
                        ? read_matrix(root["coriolis_mass"], "coriolis_mass", source)
                        : p.mass;
  p.damping_linear = root["damping_linear"]
                         ? read_matrix(root["damping_linear"], "damping_linear", source)
                         : Mat3::Zero();
  if (root["damping_quadratic"]) {
    const auto q = detail::numbers(root["damping_quadratic"], 3, "damping_quadratic", source);
    p.damping_quadratic = Vec3{q[0], q[1], q[2]};
  }

  if (const YAML::Node ths = root["thrusters"]) {
    if (!ths.IsSequence()) {
      throw ParseError(fmt::format("{}: 'thrusters' must be a list", detail::where(source, ths)));
    }
    for (const auto& t : ths) {
      Thruster th;
      th.dx = detail::get<double>(t, "dx", source);
      th.dy = detail::get<double>(t, "dy", source);
      th.max_force = detail::get<double>(t, "max_force", source);
      th.steerable = detail::get_or<bool>(t, "steerable", false, source);
      if (th.steerable) {
        th.angle_min = detail::get<double>(t, "angle_min", source);
        th.angle_max = detail::get<double>(t, "angle_max", source);
      } else {
        th.angle_min = th.angle_max = detail::get_or<double>(t, "angle", 0.0, source);
      }
      p.thrusters.push_back(th);
    }
  }

  p.finalize();
  return p;
}

VesselParams load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open vessel document '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str(), path.string());
}

std::string dump_model(const VesselParams& p) {
  YAML::Emitter out;
  auto matrix = [&](const char* key, const Mat3& m) {
    out << YAML::Key << key << YAML::Value << YAML::BeginSeq;
    for (int i = 0; i < 3; ++i) {
      out << YAML::Flow << YAML::BeginSeq << m(i, 0) << m(i, 1) << m(i, 2) << YAML::EndSeq;
    }
    out << YAML::EndSeq;
  };
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << p.name;
  out << YAML::Key << "length" << YAML::Value << p.length;
  matrix("mass", p.mass);
  matrix("coriolis_mass", p.coriolis_mass);
  matrix("damping_linear", p.damping_linear);
  out << YAML::Key << "damping_quadratic" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << p.damping_quadratic[0] << p.damping_quadratic[1] << p.damping_quadratic[2] << YAML::EndSeq;
  out << YAML::Key << "thrusters" << YAML::Value << YAML::BeginSeq;
  for (const auto& t : p.thrusters) {
    out << YAML::BeginMap;
    out << YAML::Key << "dx" << YAML::Value << t.dx;
    out << YAML::Key << "dy" << YAML::Value << t.dy;
    out << YAML::Key << "max_force" << YAML::Value << t.max_force;
    out << YAML::Key << "steerable" << YAML::Value << t.steerable;
    if (t.steerable) {
      out << YAML::Key << "angle_min" << YAML::Value << t.angle_min;
      out << YAML::Key << "angle_max" << YAML::Value << t.angle_max;
    } else {
      out << YAML::Key << "angle" << YAML::Value << t.angle_min;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace asv
