#pragma once

#include <map>
#include <numbers>
#include <string>
#include <string_view>

namespace abh {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Flat `key = value` document. Lines starting with '#' are comments.
class KeyValueDoc {
 public:
  static KeyValueDoc parse(std::string_view text);
  static KeyValueDoc from_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::string text(const std::string& key) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;
  const std::map<std::string, std::string>& entries() const { return values_; }

  /// Canonical rendering (sorted keys). Used for manifest hashes.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Ion-ring and field parameters plus unit constants.
struct PhysicalConfig {
  int n_ions = 1000;
  double period = 1.0;
  double radius = 1.0;
  double ion_mass = 1.0;
  double ion_charge = 1.0;
  double v_min = 0.0;
  double v_max = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double theta_h = 0.0;
  double hbar = 1.0;
  double k_boltzmann = 1.0;

  /// Uniform pre-collapse velocity 2*pi/T.
  double uniform_velocity() const { return kTwoPi / period; }
};

struct DerivedParams {
  double delta = 0.0;      // mean ion separation 2*pi/N
  double rho = 0.0;        // conformal factor m R^2 N / (v T)
  double tau = 0.0;        // collapse time 0.05 T
  double omega_max = 0.0;  // N / T
  double delta_v = 0.0;    // v_max - v_min
  double sigma_v = 0.0;    // v_max + v_min
  double kappa = 0.0;      // delta_v / (2 a), line-profile slope with a = 1
};

/// Throws ConfigError naming the offending field.
void validate(const PhysicalConfig& config);

PhysicalConfig config_from_doc(const KeyValueDoc& doc);
PhysicalConfig load_config(std::string_view text);
PhysicalConfig load_config_file(const std::string& path);

/// Derived quantities; rho is evaluated at `reference_velocity`.
DerivedParams derive(const PhysicalConfig& config, double reference_velocity);
/// Same, with rho at the uniform velocity 2*pi/T.
DerivedParams derive(const PhysicalConfig& config);

/// Line-profile slope kappa = (v_max - v_min) / (2 a).
double line_kappa(double v_max, double v_min, double half_width);

/// The built-in default configuration document.
std::string_view default_config_text();

}  // namespace abh
