#pragma once

// MATPOWER .m case parsing into a per-unit Network. Only the fields needed
// for DC switching models are interpreted; everything else is passed over.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridswitch/network.hpp"

namespace gridswitch {

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class MissingBlock : public ParseError {
 public:
  explicit MissingBlock(const std::string& block)
      : ParseError("missing block: mpc." + block), block_(block) {}
  const std::string& block() const { return block_; }

 private:
  std::string block_;
};

class MalformedRow : public ParseError {
 public:
  MalformedRow(const std::string& block, int line, const std::string& detail)
      : ParseError("malformed row in mpc." + block + " near line " +
                   std::to_string(line) + ": " + detail) {}
};

// mpc.* blocks exactly as read, before any unit conversion.
struct RawCase {
  double base_mva = 0.0;
  std::vector<std::vector<double>> bus_rows;
  std::vector<std::vector<double>> gen_rows;
  std::vector<std::vector<double>> branch_rows;
  std::vector<std::vector<double>> gencost_rows;
};

// MATPOWER column positions (0-based)
namespace mpc {
inline constexpr int BUS_I = 0;
inline constexpr int BUS_PD = 2;
inline constexpr int GEN_BUS = 0;
inline constexpr int GEN_PMAX = 8;
inline constexpr int GEN_PMIN = 9;
inline constexpr int GEN_STATUS = 7;
inline constexpr int BR_F_BUS = 0;
inline constexpr int BR_T_BUS = 1;
inline constexpr int BR_X = 3;
inline constexpr int BR_RATE_A = 5;
inline constexpr int BR_STATUS = 10;
inline constexpr int COST_MODEL = 0;
inline constexpr int COST_NCOST = 3;
}  // namespace mpc

namespace detail {

inline std::string strip_comment(const std::string& line) {
  auto pos = line.find('%');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

inline double parse_number(const std::string& tok, const std::string& block,
                           int line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw MalformedRow(block, line, "non-numeric token '" + tok + "'");
  return v;
}

}  // namespace detail

inline RawCase parse_matpower(std::istream& in) {
  RawCase raw;
  bool have_base = false;
  std::map<std::string, std::vector<std::vector<double>>> blocks;

  std::string line;
  int lineno = 0;
  std::string current_block;  // non-empty while inside an mpc.X = [ ... ];
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::strip_comment(line);
    // trim
    auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r\n");
    line = line.substr(first, last - first + 1);
    if (line.empty()) continue;

    if (current_block.empty()) {
      if (line.rfind("mpc.baseMVA", 0) == 0) {
        auto eq = line.find('=');
        if (eq == std::string::npos)
          throw MalformedRow("baseMVA", lineno, "expected '='");
        std::string rhs = line.substr(eq + 1);
        rhs.erase(rhs.find_last_not_of(" \t;") + 1);
        rhs.erase(0, rhs.find_first_not_of(" \t"));
        raw.base_mva = detail::parse_number(rhs, "baseMVA", lineno);
        have_base = true;
        continue;
      }
      if (line.rfind("mpc.", 0) == 0) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto bracket = line.find('[', eq);
        if (bracket == std::string::npos) continue;  // scalar/string field
        std::string name = line.substr(4, eq - 4);
        name.erase(name.find_last_not_of(" \t") + 1);
        current_block = name;
        blocks[current_block];  // block may legitimately be empty
        line = line.substr(bracket + 1);
        if (line.empty()) continue;
        // fall through to row parsing with the remainder of this line
      } else {
        continue;  // function header, version string, etc.
      }
    }

    // inside a matrix block
    bool closes = false;
    auto close = line.find(']');
    if (close != std::string::npos) {
      closes = true;
      line = line.substr(0, close);
    }
    // rows may be terminated by ';' and several may share a line
    std::stringstream rows(line);
    std::string rowtext;
    while (std::getline(rows, rowtext, ';')) {
      std::stringstream toks(rowtext);
      std::string tok;
      std::vector<double> row;
      while (toks >> tok)
        row.push_back(detail::parse_number(tok, current_block, lineno));
      if (!row.empty()) blocks[current_block].push_back(std::move(row));
    }
    if (closes) current_block.clear();
  }

  if (!have_base) throw MissingBlock("baseMVA");
  for (const char* name : {"bus", "gen", "branch", "gencost"})
    if (blocks.find(name) == blocks.end() || blocks[name].empty())
      throw MissingBlock(name);

  raw.bus_rows = std::move(blocks["bus"]);
  raw.gen_rows = std::move(blocks["gen"]);
  raw.branch_rows = std::move(blocks["branch"]);
  raw.gencost_rows = std::move(blocks["gencost"]);

  auto check_width = [](const std::vector<std::vector<double>>& rows,
                        std::size_t min_cols, const std::string& name) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].size() < min_cols)
        throw MalformedRow(name, static_cast<int>(i),
                           "expected at least " + std::to_string(min_cols) +
                               " columns, got " +
                               std::to_string(rows[i].size()));
  };
  check_width(raw.bus_rows, 13, "bus");
  check_width(raw.branch_rows, 13, "branch");
  check_width(raw.gen_rows, 10, "gen");
  check_width(raw.gencost_rows, 4, "gencost");
  if (raw.base_mva <= 0.0) throw ParseError("baseMVA must be positive");
  return raw;
}

inline RawCase parse_matpower(const std::string& text) {
  std::istringstream in(text);
  return parse_matpower(in);
}

struct NetworkOptions {
  bool zero_pmin = false;       // force p_min = 0 on every generator
  bool linearize = false;       // drop quadratic cost terms instead of failing
  bool reject_islands = false;  // fail on buses with no branch and no generator
  double unbounded_capacity = 100.0;  // p.u., substituted for RATE_A = 0
  double theta_min = -0.6;            // rad
  double theta_max = 0.6;
  double quad_tol = 1e-9;  // |c2| below this counts as linear
};

class ConversionError : public std::runtime_error {
 public:
  explicit ConversionError(const std::string& what)
      : std::runtime_error(what) {}
};

class QuadraticCostUnsupported : public ConversionError {
 public:
  explicit QuadraticCostUnsupported(int gen)
      : ConversionError("generator " + std::to_string(gen) +
                        " has a quadratic cost term (use linearize to drop "
                        "it)") {}
};

class ZeroReactance : public ConversionError {
 public:
  explicit ZeroReactance(int branch)
      : ConversionError("branch row " + std::to_string(branch) +
                        " has zero reactance") {}
};

class IslandedBus : public ConversionError {
 public:
  explicit IslandedBus(int external_id)
      : ConversionError("bus " + std::to_string(external_id) +
                        " has no branch and no generator") {}
};

inline Network to_network(const RawCase& raw, const NetworkOptions& opts = {}) {
  Network net;
  net.theta_min = opts.theta_min;
  net.theta_max = opts.theta_max;
  const double base = raw.base_mva;

  std::map<int, int> dense;  // external bus id -> dense index
  for (const auto& row : raw.bus_rows) {
    const int ext = static_cast<int>(row[mpc::BUS_I]);
    Bus b;
    b.id = static_cast<int>(net.buses.size());
    b.demand = row[mpc::BUS_PD] / base;
    dense[ext] = b.id;
    net.buses.push_back(b);
    net.external_bus_id.push_back(ext);
  }

  for (std::size_t i = 0; i < raw.branch_rows.size(); ++i) {
    const auto& row = raw.branch_rows[i];
    if (row[mpc::BR_STATUS] == 0.0) continue;  // out of service
    const double x = row[mpc::BR_X];
    if (x == 0.0) throw ZeroReactance(static_cast<int>(i));
    Branch e;
    e.id = static_cast<int>(net.branches.size());
    auto f = dense.find(static_cast<int>(row[mpc::BR_F_BUS]));
    auto t = dense.find(static_cast<int>(row[mpc::BR_T_BUS]));
    if (f == dense.end() || t == dense.end())
      throw ConversionError("branch row " + std::to_string(i) +
                            " references unknown bus");
    e.from = f->second;
    e.to = t->second;
    e.susceptance = 1.0 / x;  // DC approximation, resistance ignored
    const double rate_a = row[mpc::BR_RATE_A];
    e.capacity = rate_a > 0.0 ? rate_a / base : opts.unbounded_capacity;
    net.branches.push_back(e);
  }

  if (raw.gencost_rows.size() < raw.gen_rows.size())
    throw ConversionError("gencost has fewer rows than gen");
  for (std::size_t i = 0; i < raw.gen_rows.size(); ++i) {
    const auto& row = raw.gen_rows[i];
    if (row[mpc::GEN_STATUS] == 0.0) continue;  // out of service
    const auto& cost = raw.gencost_rows[i];
    const int model = static_cast<int>(cost[mpc::COST_MODEL]);
    if (model != 2)
      throw ConversionError("gencost row " + std::to_string(i) +
                            ": only polynomial cost (model 2) is supported");
    const int ncost = static_cast<int>(cost[mpc::COST_NCOST]);
    if (cost.size() < static_cast<std::size_t>(4 + ncost))
      throw ConversionError("gencost row " + std::to_string(i) +
                            " truncated");
    // coefficients are highest order first
    double c2 = 0.0, c1 = 0.0, c0 = 0.0;
    if (ncost >= 1) c0 = cost[4 + ncost - 1];
    if (ncost >= 2) c1 = cost[4 + ncost - 2];
    if (ncost >= 3) c2 = cost[4 + ncost - 3];
    if (ncost >= 4)
      throw ConversionError("gencost row " + std::to_string(i) +
                            ": polynomial degree > 2 unsupported");
    if (std::abs(c2) > opts.quad_tol) {
      if (!opts.linearize) throw QuadraticCostUnsupported(static_cast<int>(i));
      std::cerr << "[netio] warning: dropping quadratic cost term c2=" << c2
                << " of generator row " << i << "\n";
    }
    Generator g;
    g.id = static_cast<int>(net.generators.size());
    auto at = dense.find(static_cast<int>(row[mpc::GEN_BUS]));
    if (at == dense.end())
      throw ConversionError("gen row " + std::to_string(i) +
                            " references unknown bus");
    g.bus = at->second;
    g.p_min = opts.zero_pmin ? 0.0 : row[mpc::GEN_PMIN] / base;
    g.p_max = row[mpc::GEN_PMAX] / base;
    g.cost_linear = c1 * base;  // $/MWh * MVA -> $/p.u./h
    g.cost_const = c0;
    net.generators.push_back(g);
  }

  net.rebuild_adjacency();
  if (opts.reject_islands) {
    for (std::size_t v = 0; v < net.buses.size(); ++v)
      if (net.branches_from[v].empty() && net.branches_to[v].empty() &&
          net.generators_at[v].empty())
        throw IslandedBus(net.external_bus_id[v]);
  }
  net.validate();
  return net;
}

}  // namespace gridswitch
