#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "pbrp/forest.hpp"

namespace pbrp::app {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void only_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where, "expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) bad(where, "unknown key '" + k + "'");
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(where, "not finite");
  return v;
}

long long integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<long long>();
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Eigen::VectorXd vec(const Json& j, const std::string& where, Eigen::Index size = -1) {
  auto v = numbers(j, where);
  if (size >= 0 && static_cast<Eigen::Index>(v.size()) != size)
    bad(where, "expected " + std::to_string(size) + " entries");
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd mat(const Json& j, const std::string& where, Eigen::Index cols) {
  if (!j.is_array() || j.empty()) bad(where, "expected a nonempty array of rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r)
    m.row(static_cast<Eigen::Index>(r)) = vec(j[r], where + "[" + std::to_string(r) + "]", cols).transpose();
  return m;
}

const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) bad(where, std::string("missing '") + key + "'");
  return j.at(key);
}

// '*' is accepted for the vertex bullet
std::string bullets(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '*')
      out += "•";
    else
      out += c;
  }
  return out;
}

ScalarPath parse_path(const Json& j, const std::string& where, double T) {
  if (!j.is_object()) bad(where, "expected a path object");
  if (!j.contains("kind") || !j["kind"].is_string()) bad(where, "missing 'kind'");
  const std::string kind = j["kind"];
  if (kind == "zero") {
    only_keys(j, where, {"kind"});
    return ScalarPath::zero();
  }
  if (kind == "polynomial") {
    only_keys(j, where, {"kind", "coefficients"});
    return ScalarPath::polynomial(numbers(need(j, "coefficients", where), where + ".coefficients"));
  }
  if (kind == "trig") {
    only_keys(j, where, {"kind", "waves"});
    const Json& w = need(j, "waves", where);
    if (!w.is_array()) bad(where + ".waves", "expected an array");
    std::vector<ScalarPath::Wave> waves;
    for (std::size_t k = 0; k < w.size(); ++k) {
      auto v = numbers(w[k], where + ".waves[" + std::to_string(k) + "]");
      if (v.size() != 3) bad(where + ".waves[" + std::to_string(k) + "]", "expected [amplitude, frequency, phase]");
      waves.push_back({v[0], v[1], v[2]});
    }
    return ScalarPath::trig(std::move(waves));
  }
  if (kind == "fbm") {
    only_keys(j, where, {"kind", "hurst", "modes", "seed", "amplitude"});
    const double H = number(need(j, "hurst", where), where + ".hurst");
    const long long modes = integer(need(j, "modes", where), where + ".modes");
    const long long seed = integer(need(j, "seed", where), where + ".seed");
    const double amp = j.contains("amplitude") ? number(j["amplitude"], where + ".amplitude") : 1.0;
    if (!(H > 0 && H < 1)) bad(where + ".hurst", "must lie in (0, 1)");
    if (modes < 1 || modes > 4096) bad(where + ".modes", "must lie in [1, 4096]");
    if (seed < 0) bad(where + ".seed", "must be >= 0");
    return ScalarPath::fbm_synthetic(H, static_cast<int>(modes), static_cast<std::uint64_t>(seed), amp, T);
  }
  bad(where + ".kind", "unknown path kind '" + kind + "'");
}

DriverSpec parse_driver(const Json& j, const Experiment& e, const std::string& where) {
  only_keys(j, where, {"letters", "intensities"});
  DriverSpec spec;
  const Json& L = need(j, "letters", where);
  if (!L.is_array() || static_cast<int>(L.size()) != e.d)
    bad(where + ".letters", "expected " + std::to_string(e.d) + " letter paths");
  for (std::size_t k = 0; k < L.size(); ++k)
    spec.letters.push_back(parse_path(L[k], where + ".letters[" + std::to_string(k) + "]", e.T));
  if (j.contains("intensities")) {
    const Json& I = j["intensities"];
    if (!I.is_array()) bad(where + ".intensities", "expected an array");
    std::set<std::string> seen;
    for (std::size_t k = 0; k < I.size(); ++k) {
      const std::string w = where + ".intensities[" + std::to_string(k) + "]";
      only_keys(I[k], w, {"tree", "path"});
      const Json& tj = need(I[k], "tree", w);
      if (!tj.is_string()) bad(w + ".tree", "expected a tree key");
      Tree t = single(Letter::base(1));
      try {
        t = parse_tree(bullets(tj.get<std::string>()));
      } catch (const std::exception& ex) {
        bad(w + ".tree", ex.what());
      }
      if (t.degree() < 2 || t.degree() > e.N) bad(w + ".tree", "degree must lie in [2, N]");
      std::vector<const Tree*> stack = {&t};
      while (!stack.empty()) {
        const Tree* x = stack.back();
        stack.pop_back();
        if (x->root().is_bracket() || x->root().i > e.d) bad(w + ".tree", "vertex outside the base letters");
        for (const auto& c : x->children()) stack.push_back(&c);
      }
      if (!seen.insert(t.key()).second) bad(w + ".tree", "tree listed twice");
      spec.intensities.emplace_back(t, parse_path(need(I[k], "path", w), w + ".path", e.T));
    }
  }
  return spec;
}

FunctionSpec parse_function(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) bad(where, "expected an object with an 'id'");
  FunctionSpec f{j["id"], j};
  f.params.erase("id");
  return f;
}

}  // namespace

bool alpha_admissible(int N, double alpha) {
  if (N == 2) return alpha > 1.0 / 3.0 && alpha <= 0.5;
  if (N == 3) return alpha > 0.25 && alpha <= 1.0 / 3.0;
  return false;
}

SmoothFunction make_function(const FunctionSpec& spec, int n) {
  const Json& p = spec.params;
  const std::string w = "function '" + spec.id + "'";
  auto scale = [&](double dflt) { return p.contains("scale") ? number(p["scale"], w + ".scale") : dflt; };
  if (spec.id == "constant") {
    only_keys(p, w, {"value"});
    return builtin::constant(vec(need(p, "value", w), w + ".value"), n);
  }
  if (spec.id == "identity") {
    only_keys(p, w, {});
    return builtin::identity(n);
  }
  if (spec.id == "affine") {
    only_keys(p, w, {"A", "b"});
    Eigen::MatrixXd A = mat(need(p, "A", w), w + ".A", n);
    return builtin::affine(A, vec(need(p, "b", w), w + ".b", A.rows()));
  }
  if (spec.id == "power_sum") {
    only_keys(p, w, {"p", "scale"});
    const long long k = integer(need(p, "p", w), w + ".p");
    if (k < 0 || k > 12) bad(w + ".p", "must lie in [0, 12]");
    return builtin::power_sum(n, static_cast<int>(k), scale(1.0));
  }
  if (spec.id == "quadratic") {
    only_keys(p, w, {"Q", "c"});
    Eigen::MatrixXd Q = mat(need(p, "Q", w), w + ".Q", n);
    if (Q.rows() != n) bad(w + ".Q", "must be square");
    Eigen::VectorXd c = p.contains("c") ? vec(p["c"], w + ".c", n) : Eigen::VectorXd::Zero(n);
    return builtin::quadratic(Q, c);
  }
  if (spec.id == "cubic") {
    only_keys(p, w, {"a", "mixed"});
    double mixed = p.contains("mixed") ? number(p["mixed"], w + ".mixed") : 0.0;
    return builtin::cubic(vec(need(p, "a", w), w + ".a", n), mixed);
  }
  if (spec.id == "sin_wave" || spec.id == "exp_wave") {
    only_keys(p, w, {"w", "scale"});
    Eigen::VectorXd k = vec(need(p, "w", w), w + ".w", n);
    return spec.id == "sin_wave" ? builtin::sin_wave(k, scale(1.0)) : builtin::exp_wave(k, scale(1.0));
  }
  if (spec.id == "sin_field") {
    only_keys(p, w, {"a", "b"});
    return builtin::sin_field(vec(need(p, "a", w), w + ".a", n),
                              p.contains("b") ? vec(p["b"], w + ".b", n) : Eigen::VectorXd::Zero(n));
  }
  if (spec.id == "monomial_field") {
    // componentwise scale * y^p
    only_keys(p, w, {"p", "scale"});
    const long long k = integer(need(p, "p", w), w + ".p");
    if (k < 0 || k > 12) bad(w + ".p", "must lie in [0, 12]");
    const double s = scale(1.0);
    return SmoothFunction(n, n, [k, s](const JetVec& y) {
      JetVec out;
      for (const auto& u : y) {
        Jet acc(s);
        for (long long q = 0; q < k; ++q) acc = acc * u;
        out.push_back(acc);
      }
      return out;
    }, "monomial_field");
  }
  bad(w, "unknown function id");
}

VectorFieldFamily make_fields(const Experiment& e) {
  VectorFieldFamily f;
  const int n = static_cast<int>(e.xi.size());
  for (const auto& s : e.fields) {
    auto g = make_function(s, n);
    if (g.out_dim() != n) bad("fields", "vector field '" + s.id + "' must map R^n to R^n");
    f.fields.push_back(std::move(g));
  }
  return f;
}

std::vector<std::size_t> mesh_strides(const Experiment& e) {
  std::vector<std::size_t> out;
  for (int L = e.coarse; L <= e.fine; ++L) out.push_back(e.cells >> L);
  return out;
}

std::size_t node_of(const Experiment& e, double time) {
  const double x = time / e.T * double(e.cells);
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 * double(e.cells) || r < 0 || r > double(e.cells))
    bad("interval", "end point is not a grid node");
  return static_cast<std::size_t>(r);
}

namespace {

Experiment parse_experiment(const Json& j, const std::string& command, const std::string& name) {
  only_keys(j, "config", {"name", "d", "N", "alpha", "grid", "driver", "function", "fields", "xi", "identity",
                          "meshes", "interval", "tolerances", "letter", "extension", "extended_alphabet",
                          "tables", "corrupt", "probes", "comment"});
  Experiment e;
  e.source = j;
  e.name = name;
  if (j.contains("name")) {
    if (!j["name"].is_string() || j["name"].get<std::string>().empty()) bad("name", "expected a nonempty string");
    e.name = j["name"];
    for (char c : e.name)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
        bad("name", "use letters, digits, '-', '_' or '.'");
  }
  if (j.contains("d")) e.d = static_cast<int>(integer(j["d"], "d"));
  if (e.d < 1 || e.d > 9) bad("d", "must lie in [1, 9]");
  if (j.contains("N")) e.N = static_cast<int>(integer(j["N"], "N"));
  else if (command == "hopf-selftest" || command == "dump") e.N = 3;
  if (e.N != 2 && e.N != 3) bad("N", "must be 2 or 3");
  e.alpha = j.contains("alpha") ? number(j["alpha"], "alpha") : (e.N == 2 ? 0.45 : 0.30);
  if (!alpha_admissible(e.N, e.alpha))
    bad("alpha", e.N == 2 ? "must lie in (1/3, 1/2] for N = 2" : "must lie in (1/4, 1/3] for N = 3");

  if (j.contains("meshes")) {
    only_keys(j["meshes"], "meshes", {"coarse", "fine"});
    e.coarse = static_cast<int>(integer(need(j["meshes"], "coarse", "meshes"), "meshes.coarse"));
    e.fine = static_cast<int>(integer(need(j["meshes"], "fine", "meshes"), "meshes.fine"));
    if (e.coarse < 0 || e.fine > 24) bad("meshes", "levels must lie in [0, 24]");
    if (e.fine - e.coarse + 1 < 4) bad("meshes", "a dyadic ladder needs at least 4 rungs");
  }
  if (j.contains("grid")) {
    const Json& g = j["grid"];
    only_keys(g, "grid", {"T", "cells", "substeps"});
    if (g.contains("T")) e.T = number(g["T"], "grid.T");
    if (!(e.T > 0)) bad("grid.T", "must be positive");
    if (g.contains("cells")) {
      const long long c = integer(g["cells"], "grid.cells");
      if (c < 0 || c > (1LL << 24)) bad("grid.cells", "must lie in [0, 2^24]");
      e.cells = static_cast<std::size_t>(c);
    } else if (e.fine > 0) {
      e.cells = std::size_t(1) << e.fine;
    } else {
      bad("grid.cells", "missing, and no mesh ladder to size the grid");
    }
    if (g.contains("substeps")) e.substeps = static_cast<int>(integer(g["substeps"], "grid.substeps"));
    if (e.substeps < 1 || e.substeps > 4096) bad("grid.substeps", "must lie in [1, 4096]");
  } else if (e.fine > 0) {
    e.cells = std::size_t(1) << e.fine;
  }
  if (e.fine > 0 && (e.cells == 0 || e.cells % (std::size_t(1) << e.fine) != 0))
    bad("grid.cells", "must be a multiple of 2^fine");

  if (j.contains("driver")) e.driver = parse_driver(j["driver"], e, "driver");
  if (j.contains("function")) e.function = parse_function(j["function"], "function");
  if (j.contains("fields")) {
    if (!j["fields"].is_array()) bad("fields", "expected an array");
    for (std::size_t k = 0; k < j["fields"].size(); ++k)
      e.fields.push_back(parse_function(j["fields"][k], "fields[" + std::to_string(k) + "]"));
  }
  if (j.contains("xi")) e.xi = vec(j["xi"], "xi");
  if (j.contains("identity")) {
    if (!j["identity"].is_string()) bad("identity", "expected 'simple' or 'general'");
    e.identity = j["identity"];
    if (e.identity != "simple" && e.identity != "general") bad("identity", "expected 'simple' or 'general'");
  }
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    only_keys(t, "tolerances", {"residual", "slack", "floor"});
    if (t.contains("residual")) e.tolerance = number(t["residual"], "tolerances.residual");
    if (t.contains("slack")) e.slack = number(t["slack"], "tolerances.slack");
    if (t.contains("floor")) e.floor = number(t["floor"], "tolerances.floor");
    if (!(e.tolerance > 0) || e.slack < 0 || !(e.floor > 0)) bad("tolerances", "must be positive");
  }
  if (j.contains("letter")) e.letter = static_cast<int>(integer(j["letter"], "letter"));
  if (e.letter < 1 || e.letter > e.d) bad("letter", "must be a base letter 1..d");
  if (j.contains("extension")) {
    if (!j["extension"].is_boolean()) bad("extension", "expected true or false");
    e.extension = j["extension"];
  }
  if (j.contains("extended_alphabet")) {
    if (!j["extended_alphabet"].is_boolean()) bad("extended_alphabet", "expected true or false");
    e.extended_alphabet = j["extended_alphabet"];
  }
  if (j.contains("tables")) {
    if (!j["tables"].is_array()) bad("tables", "expected an array");
    for (const auto& t : j["tables"]) {
      if (!t.is_string()) bad("tables", "expected table names");
      const std::string s = t;
      if (s != "coproduct" && s != "star" && s != "rough_path" && s != "controlled_path")
        bad("tables", "unknown table '" + s + "'");
      e.tables.push_back(s);
    }
  }
  if (j.contains("corrupt")) {
    const Json& c = j["corrupt"];
    only_keys(c, "corrupt", {"forest", "left", "right", "delta"});
    CorruptSpec cs;
    for (auto [key, dst] : {std::pair{"forest", &cs.forest}, {"left", &cs.left}, {"right", &cs.right}}) {
      if (!need(c, key, "corrupt").is_string()) bad(std::string("corrupt.") + key, "expected a forest key");
      *dst = bullets(c[key]);
    }
    if (c.contains("delta")) cs.delta = integer(c["delta"], "corrupt.delta");
    e.corrupt = cs;
  }
  if (j.contains("probes")) {
    only_keys(j["probes"], "probes", {"count", "seed"});
    if (j["probes"].contains("count")) e.probes = static_cast<int>(integer(j["probes"]["count"], "probes.count"));
    if (j["probes"].contains("seed")) e.seed = static_cast<std::uint64_t>(integer(j["probes"]["seed"], "probes.seed"));
    if (e.probes < 1 || e.probes > 1000000) bad("probes.count", "must lie in [1, 10^6]");
  }
  if (j.contains("interval")) {
    auto v = numbers(j["interval"], "interval");
    if (v.size() != 2 || !(v[0] < v[1]) || v[0] < 0 || v[1] > e.T) bad("interval", "expected [s, t] with 0 <= s < t <= T");
    e.s = v[0];
    e.t = v[1];
  }

  // what each command needs
  auto require = [&](bool ok, const char* key) {
    if (!ok) bad(key, "required by '" + command + "'");
  };
  const bool needs_path = command == "lift" || command == "integrate" || command == "rde" || command == "ito" ||
                          (command == "dump" && std::any_of(e.tables.begin(), e.tables.end(), [](const std::string& s) {
                             return s == "rough_path" || s == "controlled_path";
                           }));
  if (needs_path) {
    require(j.contains("driver"), "driver");
    require(j.contains("grid") || e.fine > 0, "grid");
  }
  if (command == "dump") require(!e.tables.empty(), "tables");
  if (command == "integrate" || command == "ito") {
    require(e.fine > 0, "meshes");
    require(e.function.has_value(), "function");
  }
  if (command == "integrate" || command == "ito" || command == "rde") {
    if (e.cells == 0) bad("grid.cells", "must be positive");
  }
  const bool general = command == "rde" || (command == "ito" && e.identity == "general");
  if (general) {
    require(!e.fields.empty(), "fields");
    require(e.xi.size() > 0, "xi");
    if (static_cast<int>(e.fields.size()) != e.d) bad("fields", "need one vector field per base letter");
  }
  // build the functions once so dimension errors surface as config errors
  if (e.function) {
    const int n = general ? static_cast<int>(e.xi.size()) : e.d;
    make_function(*e.function, n);
  }
  if (general) make_fields(e);
  if (e.fine > 0) {
    const std::size_t coarse_stride = e.cells >> e.coarse;
    const std::size_t a = node_of(e, e.s), b = node_of(e, e.t < 0 ? e.T : e.t);
    if (a % coarse_stride != 0 || b % coarse_stride != 0) bad("interval", "end points must lie on the coarsest mesh");
  }
  return e;
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& ex) {
    throw ConfigError(path + ": " + ex.what());
  }
}

std::string resolve_config_path(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  if (arg.find('/') == std::string::npos) {
    for (const fs::path& cand : {fs::path(PBRP_CONFIG_DIR) / arg, fs::path(PBRP_CONFIG_DIR) / (arg + ".json")})
      if (fs::exists(cand)) return cand.string();
  }
  return arg;
}

Config parse_config(const Json& doc, const std::string& command, const std::string& default_name) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  Config c;
  try {
    if (!doc.contains("experiments")) {
      c.experiments.push_back(parse_experiment(doc, command, default_name));
      return c;
    }
    const Json& list = doc["experiments"];
    if (!list.is_array() || list.empty()) bad("experiments", "expected a nonempty array");
    Json base = doc;
    base.erase("experiments");
    std::set<std::string> names;
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (!list[k].is_object()) bad("experiments[" + std::to_string(k) + "]", "expected an object");
      // shallow: an experiment key replaces the top-level value whole
      Json merged = base;
      for (const auto& [key, value] : list[k].items()) merged[key] = value;
      merged.erase("comment");
      std::string fallback = default_name + "-" + std::to_string(k);
      Experiment e;
      try {
        e = parse_experiment(merged, command, fallback);
      } catch (const ConfigError& ex) {
        bad("experiments[" + std::to_string(k) + "]", ex.what());
      }
      if (!names.insert(e.name).second) bad("experiments[" + std::to_string(k) + "].name", "duplicate name");
      c.experiments.push_back(std::move(e));
    }
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  return c;
}

Config load_config(const std::string& arg, const std::string& command) {
  const std::string path = resolve_config_path(arg);
  return parse_config(read_json_file(path), command, fs::path(path).stem().string());
}

Config default_config(const std::string& command) {
  Json doc = Json::object();
  if (command == "hopf-selftest") {
    doc["d"] = 2;
    doc["N"] = 3;
    return parse_config(doc, command, "selftest");
  }
  throw ConfigError("'" + command + "' needs --config");
}

}  // namespace pbrp::app
