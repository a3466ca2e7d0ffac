#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pbrp/calculus.hpp"
#include "pbrp/rough_path.hpp"

namespace pbrp::app {

using Json = nlohmann::ordered_json;

// invalid document or values: exit 64
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// unreadable or unwritable files: exit 3
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FunctionSpec {
  std::string id;
  Json params;
};

struct CorruptSpec {
  std::string forest, left, right;
  long long delta = 1;
};

struct Experiment {
  std::string name;
  int d = 1;
  int N = 2;
  double alpha = 0.45;
  double T = 1.0;
  std::size_t cells = 0;  // 0 until resolved from the meshes
  int substeps = 64;
  DriverSpec driver;
  std::optional<FunctionSpec> function;  // F
  std::vector<FunctionSpec> fields;      // f_1..f_d
  Eigen::VectorXd xi;
  std::string identity = "simple";       // ito: simple | general
  int coarse = 0, fine = 0;              // meshes T 2^-coarse .. T 2^-fine
  double s = 0.0, t = -1.0;              // interval, t < 0 means T
  double tolerance = 1e-5;
  double slack = 0.3;
  double floor = 1e-11;
  int letter = 1;                        // integrate
  bool extension = false;                // lift: also write the bracket extension
  bool extended_alphabet = false;        // hopf tables over A plus brackets
  std::vector<std::string> tables;       // dump
  std::optional<CorruptSpec> corrupt;    // selftest negative control
  std::uint64_t seed = 1;                // probe sampling
  int probes = 1000;
  Json source;                           // the merged experiment object
};

struct Config {
  std::vector<Experiment> experiments;
};

// Name or path; bare names are looked up in the bundled configs directory.
std::string resolve_config_path(const std::string& arg);

Json read_json_file(const std::string& path);
Config parse_config(const Json& doc, const std::string& command, const std::string& default_name);
Config load_config(const std::string& arg, const std::string& command);
// Used when a command runs without --config.
Config default_config(const std::string& command);

SmoothFunction make_function(const FunctionSpec& spec, int in_dim);
VectorFieldFamily make_fields(const Experiment& e);

// alpha range for truncation N: (1/3, 1/2] or (1/4, 1/3]
bool alpha_admissible(int N, double alpha);

std::vector<std::size_t> mesh_strides(const Experiment& e);
std::size_t node_of(const Experiment& e, double time);

}  // namespace pbrp::app
