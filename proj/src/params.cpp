#include "thermoscope/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "thermoscope/errors.hpp"
#include "thermoscope/units.hpp"

namespace thermoscope {

using nlohmann::json;

double ExperimentParams::effective_wavenumber() const {
  return wavenumber() * std::cos(alpha);
}

void ExperimentParams::validate() const {
  if (!(mass > 0.0)) throw ValidationError("experiment params: mass must be > 0");
  if (!(gamma > 0.0)) throw ValidationError("experiment params: gamma must be > 0");
  if (!(wavelength > 0.0)) throw ValidationError("experiment params: wavelength must be > 0");
  if (!(trap_omega > 0.0)) throw ValidationError("experiment params: trap_omega must be > 0");
  if (!(alpha >= 0.0 && alpha < constants::pi / 2.0))
    throw ValidationError("experiment params: alpha must lie in [0, pi/2); cos(alpha) = 0 makes the model singular");
  if (!(xi > 0.0 && xi <= 1.0)) throw ValidationError("experiment params: xi must lie in (0, 1]");
}

void LaserSetting::validate() const {
  if (!(rabi >= 0.0)) throw ValidationError("laser setting: rabi must be >= 0");
}

void HeatingRate::validate() const {
  if (!(zeta >= 0.0)) throw ValidationError("heating rate: zeta must be >= 0");
}

namespace {

double convert_field(const std::string& field, double value, const std::string& unit) {
  if (unit == "SI" || unit == "kg" || unit == "rad/s" || unit == "m" || unit == "rad" || unit.empty())
    return value;
  if (unit == "amu") return units::amu_to_kg(value);
  if (unit == "MHz") return units::mhz_to_rad_s(value);
  if (unit == "kHz") return units::khz_to_rad_s(value);
  if (unit == "nm") return units::nm_to_m(value);
  if (unit == "deg") return units::deg_to_rad(value);
  throw ValidationError("experiment params: unsupported unit '" + unit + "' for field '" + field + "'");
}

double read_field(const json& doc, const json& units_block, const std::string& field,
                  bool required, double fallback) {
  if (!doc.contains(field)) {
    if (required) throw ValidationError("experiment params: missing field '" + field + "'");
    return fallback;
  }
  if (!doc[field].is_number())
    throw ValidationError("experiment params: field '" + field + "' must be a number");
  std::string unit;
  if (units_block.contains(field)) unit = units_block[field].get<std::string>();
  return convert_field(field, doc[field].get<double>(), unit);
}

}  // namespace

ExperimentParams experiment_params_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("experiment params: JSON parse failure: ") + e.what());
  }
  json units_block = doc.value("units", json::object());

  ExperimentParams p;
  p.mass = read_field(doc, units_block, "mass", true, 0.0);
  p.gamma = read_field(doc, units_block, "gamma", true, 0.0);
  p.wavelength = read_field(doc, units_block, "wavelength", true, 0.0);
  p.trap_omega = read_field(doc, units_block, "trap_omega", true, 0.0);
  p.alpha = read_field(doc, units_block, "alpha", false, 0.0);
  p.xi = read_field(doc, units_block, "xi", false, 1.0 / 3.0);
  p.validate();
  return p;
}

ExperimentParams load_experiment_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("experiment params: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return experiment_params_from_json_text(buf.str());
}

std::string experiment_params_to_json_text(const ExperimentParams& p) {
  json doc;
  doc["mass"] = p.mass;
  doc["gamma"] = p.gamma;
  doc["wavelength"] = p.wavelength;
  doc["trap_omega"] = p.trap_omega;
  doc["alpha"] = p.alpha;
  doc["xi"] = p.xi;
  doc["units"] = {{"mass", "kg"},        {"gamma", "rad/s"}, {"wavelength", "m"},
                  {"trap_omega", "rad/s"}, {"alpha", "rad"},   {"xi", ""}};
  return doc.dump(2) + "\n";
}

void save_experiment_params(const ExperimentParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("experiment params: cannot write '" + path + "'");
  out << experiment_params_to_json_text(p);
}

}  // namespace thermoscope
