#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace gridswitch {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, Equal, GreaterEqual };

// semantic handle linking a column/row back to the grid entity it models
enum class TagKind {
  None,
  Generation,   // p_g, id = generator
  Angle,        // theta_v, id = bus
  Flow,         // f_e, id = branch
  Switch,       // x_e, id = branch
  Balance,      // nodal balance row, id = bus
  FlowDefEq,    // b_e * dtheta = f_e, id = branch
  FlowDefLo,    // big-M row, >= side, id = branch
  FlowDefHi,    // big-M row, <= side, id = branch
  FlowCapLo,    // -fbar x <= f, id = branch
  FlowCapHi,    // f <= fbar x, id = branch
};

struct Tag {
  TagKind kind = TagKind::None;
  int id = -1;
  bool operator==(const Tag&) const = default;
  std::string str() const {
    static const char* names[] = {"none", "p",      "theta",  "f",
                                  "x",    "bal",    "fdef",   "fdef_lo",
                                  "fdef_hi", "cap_lo", "cap_hi"};
    return std::string(names[static_cast<int>(kind)]) + "_" +
           std::to_string(id);
  }
};

struct Variable {
  std::string name;
  double lower = -kInf;
  double upper = kInf;
  Tag tag;
};

struct Row {
  std::vector<std::pair<int, double>> coeffs;  // (column, coefficient)
  RowSense sense = RowSense::Equal;
  double rhs = 0.0;
  Tag tag;
};

class LinearProgram {
 public:
  std::vector<Variable> vars;
  std::vector<Row> rows;
  std::vector<double> objective;  // per variable, minimize
  double objective_const = 0.0;

  int add_variable(std::string name, double lower, double upper, double cost,
                   Tag tag = {}) {
    const int col = static_cast<int>(vars.size());
    vars.push_back({std::move(name), lower, upper, tag});
    objective.push_back(cost);
    return col;
  }

  int add_row(Row row) {
    rows.push_back(std::move(row));
    return static_cast<int>(rows.size()) - 1;
  }

  std::size_t num_vars() const { return vars.size(); }
  std::size_t num_rows() const { return rows.size(); }

  int column_of(Tag tag) const {
    for (std::size_t j = 0; j < vars.size(); ++j)
      if (vars[j].tag == tag) return static_cast<int>(j);
    return -1;
  }

  int row_of(Tag tag) const {
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].tag == tag) return static_cast<int>(i);
    return -1;
  }

  // Canonical text form: rows and bounds sorted by semantic tag, numbers
  // printed at full precision. Two models with equal fingerprints have the
  // same constraint multiset regardless of construction order.
  std::string fingerprint() const {
    auto num = [](double v) {
      std::ostringstream os;
      os.precision(17);
      os << v;
      return os.str();
    };
    std::vector<std::string> lines;
    for (const auto& r : rows) {
      std::vector<std::pair<std::string, double>> terms;
      for (auto [col, coef] : r.coeffs) terms.push_back({vars[col].tag.str(), coef});
      std::sort(terms.begin(), terms.end());
      std::ostringstream os;
      os << "row " << r.tag.str() << " :";
      for (auto& [t, c] : terms) os << " " << num(c) << "*" << t;
      os << (r.sense == RowSense::LessEqual
                 ? " <= "
                 : r.sense == RowSense::Equal ? " == " : " >= ")
         << num(r.rhs);
      lines.push_back(os.str());
    }
    for (std::size_t j = 0; j < vars.size(); ++j) {
      std::ostringstream os;
      os << "var " << vars[j].tag.str() << " in [" << num(vars[j].lower)
         << "," << num(vars[j].upper) << "] cost " << num(objective[j]);
      lines.push_back(os.str());
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (auto& l : lines) {
      out += l;
      out += '\n';
    }
    return out;
  }

  // Industry LP-format export, for cross-checking with external tools.
  void write_lp_format(std::ostream& os,
                       const std::vector<int>* binaries = nullptr) const {
    os << "Minimize\n obj:";
    bool any = false;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (objective[j] == 0.0) continue;
      os << (objective[j] >= 0 ? " + " : " - ") << std::abs(objective[j])
         << " " << vars[j].name;
      any = true;
    }
    if (!any) os << " 0 " << vars[0].name;
    os << "\nSubject To\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      os << " c" << i << ":";
      for (auto [col, coef] : rows[i].coeffs)
        os << (coef >= 0 ? " + " : " - ") << std::abs(coef) << " "
           << vars[col].name;
      switch (rows[i].sense) {
        case RowSense::LessEqual: os << " <= "; break;
        case RowSense::Equal: os << " = "; break;
        case RowSense::GreaterEqual: os << " >= "; break;
      }
      os << rows[i].rhs << "\n";
    }
    os << "Bounds\n";
    for (const auto& v : vars) {
      if (v.lower == -kInf && v.upper == kInf)
        os << " " << v.name << " free\n";
      else if (v.lower == -kInf)
        os << " -inf <= " << v.name << " <= " << v.upper << "\n";
      else if (v.upper == kInf)
        os << " " << v.name << " >= " << v.lower << "\n";
      else
        os << " " << v.lower << " <= " << v.name << " <= " << v.upper << "\n";
    }
    if (binaries && !binaries->empty()) {
      os << "Binaries\n";
      for (int col : *binaries) os << " " << vars[col].name << "\n";
    }
    os << "End\n";
  }
};

class MipstartShapeMismatch : public std::runtime_error {
 public:
  MipstartShapeMismatch()
      : std::runtime_error("mipstart does not assign {0,1} to every binary") {}
};

struct MixedIntegerProgram {
  LinearProgram lp;
  std::vector<int> binaries;  // columns with bounds [0,1]
  // optional start assignment, one {0,1} value per entry of `binaries`
  std::optional<std::vector<int>> mipstart;

  void set_mipstart(std::vector<int> values) {
    if (values.size() != binaries.size()) throw MipstartShapeMismatch();
    for (int v : values)
      if (v != 0 && v != 1) throw MipstartShapeMismatch();
    mipstart = std::move(values);
  }
};

}  // namespace gridswitch
