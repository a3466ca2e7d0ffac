#include "pbrp/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace pbrp {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void banner(std::ostream& os, const char* kind) { os << "# pbrp " << kind << " v" << kCsvVersion << '\n'; }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw CsvError("csv: not a number: '" + s + "'");
  }
  if (used != s.size()) throw CsvError("csv: trailing characters in '" + s + "'");
  return v;
}

}  // namespace

void write_rough_path(std::ostream& os, const RoughPath& X) {
  const auto& B = X.basis();
  banner(os, "rough-path");
  os << "# N=" << X.truncation() << '\n';
  os << "# alpha=" << format_real(X.alpha()) << '\n';
  os << "# letters=";
  for (std::size_t k = 0; k < B.letters().size(); ++k) os << (k ? " " : "") << letter_key(B.letters()[k]);
  os << '\n';
  os << "# x0=";
  for (Eigen::Index i = 0; i < X.x0().size(); ++i) os << (i ? " " : "") << format_real(X.x0()(i));
  os << '\n';
  os << "# t0=" << format_real(X.grid().front()) << '\n';
  os << "t_start,t_end,forest,coefficient\n";
  for (std::size_t k = 0; k < X.cells(); ++k) {
    const std::string a = format_real(X.grid()[k]), b = format_real(X.grid()[k + 1]);
    const Eigen::VectorXd& g = X.steps()[k];
    for (std::size_t f = 0; f < B.size(); ++f)
      os << a << ',' << b << ',' << B.forest(f).key() << ',' << format_real(g(static_cast<Eigen::Index>(f))) << '\n';
  }
}

RoughPathPtr read_rough_path(std::istream& is) {
  std::string line;
  std::map<std::string, std::string> meta;
  bool header = false, banner_seen = false;
  while (!header && std::getline(is, line)) {
    if (line.rfind("# pbrp rough-path v", 0) == 0) {
      if (line != "# pbrp rough-path v" + std::to_string(kCsvVersion))
        throw CsvError("csv: unsupported rough-path version: " + line);
      banner_seen = true;
    } else if (line.rfind("# ", 0) == 0) {
      auto eq = line.find('=');
      if (eq != std::string::npos) meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
    } else if (line == "t_start,t_end,forest,coefficient") {
      header = true;
    } else {
      throw CsvError("csv: unexpected line before the header: " + line);
    }
  }
  if (!banner_seen || !header) throw CsvError("csv: not a rough-path table");
  for (const char* key : {"N", "alpha", "letters", "x0", "t0"})
    if (!meta.count(key)) throw CsvError(std::string("csv: missing '") + key + "' line");

  std::vector<Letter> letters;
  for (const auto& s : split(meta["letters"], ' '))
    if (!s.empty()) letters.push_back(parse_tree("•" + s).root());
  const int N = std::stoi(meta["N"]);
  auto basis = basis_for(letters, N);
  Eigen::VectorXd x0;
  {
    std::vector<double> v;
    for (const auto& s : split(meta["x0"], ' '))
      if (!s.empty()) v.push_back(parse_real(s));
    x0 = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  std::vector<double> grid = {parse_real(meta["t0"])};
  std::vector<Eigen::VectorXd> steps;
  std::vector<bool> seen;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != 4) throw CsvError("csv: expected 4 columns: " + line);
    const double a = parse_real(cols[0]), b = parse_real(cols[1]);
    const bool same_cell = !steps.empty() && a == grid[grid.size() - 2] && b == grid.back();
    if (!same_cell) {
      if (a != grid.back() || !(b > a)) throw CsvError("csv: cells out of order at t=" + cols[0]);
      if (!steps.empty() && rows != basis->size()) throw CsvError("csv: incomplete cell before t=" + cols[0]);
      grid.push_back(b);
      steps.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size())));
      seen.assign(basis->size(), false);
      rows = 0;
    }
    auto k = basis->find(parse_forest(cols[2]));
    if (!k) throw CsvError("csv: forest outside the alphabet: " + cols[2]);
    if (seen[*k]) throw CsvError("csv: duplicate row: " + line);
    seen[*k] = true;
    ++rows;
    steps.back()(static_cast<Eigen::Index>(*k)) = parse_real(cols[3]);
  }
  if (!steps.empty() && rows != basis->size()) throw CsvError("csv: incomplete last cell");
  return std::make_shared<const RoughPath>(basis, std::move(grid), std::move(steps), x0,
                                           parse_real(meta["alpha"]));
}

void write_controlled_path(std::ostream& os, const ControlledPath& Y) {
  banner(os, "controlled-path");
  os << "# N=" << Y.truncation() << '\n';
  os << "# dim=" << Y.dim() << '\n';
  os << "# stride=" << Y.stride() << '\n';
  os << "time,forest,component,value\n";
  const auto& grid = Y.rough_path().grid();
  for (std::size_t k = 0; k < Y.count(); ++k) {
    const std::string t = format_real(grid[Y.xnode(k)]);
    for (std::size_t f = 0; f < Y.forests().size(); ++f) {
      const Eigen::VectorXd v = Y.coeff(f, Y.xnode(k));
      for (Eigen::Index c = 0; c < v.size(); ++c)
        os << t << ',' << Y.forests()[f].key() << ',' << c << ',' << format_real(v(c)) << '\n';
    }
  }
}

void write_coproduct(std::ostream& os, const HopfTables& T) {
  banner(os, "coproduct");
  os << "# N=" << T.truncation() << '\n';
  os << "# forests=" << T.forests().size() << '\n';
  os << "forest,left,right,coefficient\n";
  for (const auto& f : T.forests()) {
    // rows in (left, right) forest order
    std::map<std::pair<Forest, Forest>, Exact> rows;
    for (const auto& [k, c] : T.coproduct(f).terms()) rows[{k.first, k.second}] += c;
    for (const auto& [k, c] : rows)
      os << f.key() << ',' << k.first.key() << ',' << k.second.key() << ',' << c << '\n';
  }
}

void write_star(std::ostream& os, const HopfTables& T) {
  banner(os, "star");
  os << "# N=" << T.truncation() << '\n';
  os << "left,right,product,coefficient\n";
  std::map<std::tuple<Forest, Forest, Forest>, Exact> rows;
  for (const auto& f : T.forests())
    for (const auto& [k, c] : T.coproduct(f).terms()) rows[{k.first, k.second, f}] += c;
  for (const auto& [k, c] : rows) {
    if (c == 0) continue;
    os << std::get<0>(k).key() << ',' << std::get<1>(k).key() << ',' << std::get<2>(k).key() << ','
       << c << '\n';
  }
}

void write_convergence(std::ostream& os, const std::vector<double>& meshes,
                       const std::vector<double>& residuals, double floor) {
  if (meshes.size() != residuals.size()) throw std::invalid_argument("convergence table: size mismatch");
  banner(os, "convergence");
  os << "mesh,residual,order\n";
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    os << format_real(meshes[k]) << ',';
    if (!std::isnan(residuals[k])) os << format_real(residuals[k]);
    os << ',';
    if (k > 0 && residuals[k] > floor && residuals[k - 1] > floor && !std::isnan(residuals[k - 1]))
      os << format_real(std::log(residuals[k] / residuals[k - 1]) / std::log(meshes[k] / meshes[k - 1]));
    os << '\n';
  }
}

}  // namespace pbrp
