#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbrp/controlled.hpp"
#include "pbrp/hopf.hpp"
#include "pbrp/rough_path.hpp"

namespace pbrp {

// Every table starts with "# pbrp <kind> v1" and optional "# key=value"
// lines, then the column header. Reals are written with %.17g, so a load
// gives back the same doubles.
inline constexpr int kCsvVersion = 1;

std::string format_real(double v);

// t_start,t_end,forest,coefficient  (dense, one row per cell and forest)
void write_rough_path(std::ostream& os, const RoughPath& X);
RoughPathPtr read_rough_path(std::istream& is);

// time,forest,component,value
void write_controlled_path(std::ostream& os, const ControlledPath& Y);

// forest,left,right,coefficient
void write_coproduct(std::ostream& os, const HopfTables& T);

// left,right,product,coefficient:  <left* * right*, product>
void write_star(std::ostream& os, const HopfTables& T);

// mesh,residual,order  (order between consecutive meshes; blank when undefined)
void write_convergence(std::ostream& os, const std::vector<double>& meshes,
                       const std::vector<double>& residuals, double floor);

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pbrp
