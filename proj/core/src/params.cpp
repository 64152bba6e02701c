#include "abh/params.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "abh/error.hpp"

namespace abh {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Ion count N=1000 and T=1 are round numbers; R, m, Q and the ring geometry are
// assumptions (the experimental constants are not part of the model). Q puts the
// sonic point at v = 2 pi / T; m is chosen so the worst-case decoherence time at
// gamma = 5e-6 is of the order of the collapse time; v_max makes each ion complete
// one revolution per period for the given v_min and geometry.
constexpr std::string_view kDefaultConfig = R"(# default ion-ring configuration
n_ions = 1000
period = 1
radius = 1
ion_mass = 8000
ion_charge = 31.499219891444838
v_min = 5.235987755982989
v_max = 7.759665091911818
gamma1 = 0.3
gamma2 = 0.3
theta_h = 1.5707963267948966
hbar = 1
k_boltzmann = 1
)";

}  // namespace

KeyValueDoc KeyValueDoc::parse(std::string_view text) {
  KeyValueDoc doc;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto raw = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    pos = (end == std::string_view::npos) ? text.size() + 1 : end + 1;
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (doc.values_.count(key)) throw ConfigError("duplicate key '" + key + "'");
    doc.values_.emplace(std::move(key), std::move(value));
  }
  return doc;
}

KeyValueDoc KeyValueDoc::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

double KeyValueDoc::number(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required field '" + key + "'");
  const std::string& s = it->second;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("field '" + key + "': '" + s + "' is not a number");
  }
  if (!std::isfinite(value)) throw ConfigError("field '" + key + "' must be finite");
  return value;
}

double KeyValueDoc::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::string KeyValueDoc::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required field '" + key + "'");
  return it->second;
}

std::string KeyValueDoc::text_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

std::string KeyValueDoc::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

void validate(const PhysicalConfig& c) {
  auto fail = [](const std::string& field, const std::string& expected) {
    throw ConfigError("field '" + field + "': expected " + expected);
  };
  if (c.n_ions < 2) fail("n_ions", "integer >= 2");
  if (!(c.period > 0)) fail("period", "> 0");
  if (!(c.radius > 0)) fail("radius", "> 0");
  if (!(c.ion_mass > 0)) fail("ion_mass", "> 0");
  if (!(c.ion_charge > 0)) fail("ion_charge", "> 0");
  if (!(c.hbar > 0)) fail("hbar", "> 0");
  if (!(c.k_boltzmann > 0)) fail("k_boltzmann", "> 0");
  if (c.v_min > c.v_max) throw ConfigError("profile extrema inverted: v_min > v_max");
  if (!(c.v_min > 0)) fail("v_min", "> 0");
  const double v0 = c.uniform_velocity();
  if (!(c.v_min < v0)) fail("v_min", "< 2*pi/period");
  if (!(c.v_max > v0)) fail("v_max", "> 2*pi/period");
  if (!(c.gamma1 > 0)) fail("gamma1", "> 0");
  if (!(c.gamma2 > 0)) fail("gamma2", "> 0");
  if (!(c.theta_h > 0 && c.theta_h < kTwoPi)) fail("theta_h", "in (0, 2*pi)");
  if (c.theta_h - c.gamma1 < 0) fail("gamma1", "<= theta_h (first ramp must start at theta >= 0)");
  if (c.theta_h + c.gamma1 > kTwoPi - c.theta_h - c.gamma2) {
    fail("theta_h", "small enough that the two ramps do not overlap");
  }
  if (c.gamma2 > c.theta_h) fail("gamma2", "<= theta_h (second ramp must end at theta <= 2*pi)");
}

PhysicalConfig config_from_doc(const KeyValueDoc& doc) {
  PhysicalConfig c;
  const double n = doc.number("n_ions");
  if (n != std::floor(n) || n < 2 || n > 1e9) throw ConfigError("field 'n_ions': expected integer >= 2");
  c.n_ions = static_cast<int>(n);
  c.period = doc.number("period");
  c.radius = doc.number("radius");
  c.ion_mass = doc.number("ion_mass");
  c.ion_charge = doc.number("ion_charge");
  c.v_min = doc.number("v_min");
  c.v_max = doc.number("v_max");
  c.gamma1 = doc.number("gamma1");
  c.gamma2 = doc.number("gamma2");
  c.theta_h = doc.number("theta_h");
  c.hbar = doc.number_or("hbar", 1.0);
  c.k_boltzmann = doc.number_or("k_boltzmann", 1.0);
  validate(c);
  return c;
}

PhysicalConfig load_config(std::string_view text) { return config_from_doc(KeyValueDoc::parse(text)); }

PhysicalConfig load_config_file(const std::string& path) {
  return config_from_doc(KeyValueDoc::from_file(path));
}

DerivedParams derive(const PhysicalConfig& c, double reference_velocity) {
  if (!(reference_velocity > 0)) throw ConfigError("reference velocity must be > 0");
  DerivedParams d;
  d.delta = kTwoPi / c.n_ions;
  d.rho = c.ion_mass * c.radius * c.radius * c.n_ions / (reference_velocity * c.period);
  d.tau = 0.05 * c.period;
  d.omega_max = c.n_ions / c.period;
  d.delta_v = c.v_max - c.v_min;
  d.sigma_v = c.v_max + c.v_min;
  d.kappa = line_kappa(c.v_max, c.v_min, 1.0);
  return d;
}

DerivedParams derive(const PhysicalConfig& c) { return derive(c, c.uniform_velocity()); }

double line_kappa(double v_max, double v_min, double half_width) {
  return (v_max - v_min) / (2.0 * half_width);
}

std::string_view default_config_text() { return kDefaultConfig; }

}  // namespace abh
