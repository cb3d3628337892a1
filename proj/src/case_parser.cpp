#include "wasse/case_parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "wasse/errors.hpp"

namespace wasse {

namespace {

std::string strip_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_comment = false;
  for (char ch : text) {
    if (ch == '%') in_comment = true;
    if (ch == '\n') in_comment = false;
    out.push_back(in_comment ? ' ' : ch);
  }
  return out;
}

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Find `name` as a standalone identifier (not a substring of a longer one)
/// followed by '='. Returns the position just past '=' or npos.
std::size_t find_assignment(const std::string& text, std::string_view name) {
  std::size_t pos = 0;
  while ((pos = text.find(name, pos)) != std::string::npos) {
    const bool left_ok = pos == 0 || !is_ident_char(text[pos - 1]);
    std::size_t after = pos + name.size();
    if (left_ok && (after >= text.size() || !is_ident_char(text[after]))) {
      while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
      if (after < text.size() && text[after] == '=') return after + 1;
    }
    pos += name.size();
  }
  return std::string::npos;
}

double parse_double_token(const std::string& token, std::string_view where) {
  try {
    std::size_t used = 0;
    double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw MalformedSection(std::string("unparseable number '") + token + "' in " +
                           std::string(where) + " section");
  }
}

double parse_scalar(const std::string& text, std::string_view name) {
  std::size_t pos = find_assignment(text, name);
  if (pos == std::string::npos) {
    throw MalformedSection(std::string("missing section: ") + std::string(name));
  }
  std::size_t end = text.find(';', pos);
  if (end == std::string::npos) end = text.size();
  std::string token(text.substr(pos, end - pos));
  // trim
  const auto first = token.find_first_not_of(" \t\r\n");
  const auto last = token.find_last_not_of(" \t\r\n");
  if (first == std::string::npos) {
    throw MalformedSection(std::string("empty value for ") + std::string(name));
  }
  return parse_double_token(token.substr(first, last - first + 1), name);
}

/// Parse `name = [ rows ];` where rows are whitespace-separated numbers and
/// ';' terminates a row.
std::vector<std::vector<double>> parse_matrix(const std::string& text, std::string_view name) {
  std::size_t pos = find_assignment(text, name);
  if (pos == std::string::npos) {
    throw MalformedSection(std::string("missing section: ") + std::string(name));
  }
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos >= text.size() || text[pos] != '[') {
    throw MalformedSection(std::string(name) + " section is not a matrix");
  }
  ++pos;
  std::vector<std::vector<double>> rows;
  std::vector<double> row;
  std::string token;
  auto flush_token = [&] {
    if (!token.empty()) {
      row.push_back(parse_double_token(token, name));
      token.clear();
    }
  };
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == ']') {
      flush_token();
      if (!row.empty()) rows.push_back(std::move(row));
      return rows;
    }
    if (c == ';') {
      flush_token();
      if (!row.empty()) rows.push_back(std::move(row));
      row.clear();
    } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      flush_token();
    } else {
      token.push_back(c);
    }
  }
  throw MalformedSection(std::string(name) + " section missing closing ']'");
}

int to_bus_id(double v, std::string_view where) {
  const int id = static_cast<int>(std::llround(v));
  if (std::abs(v - id) > 1e-9 || id <= 0) {
    throw MalformedSection(std::string("bad bus id in ") + std::string(where) + " section");
  }
  return id;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

bool GridCase::has_bus(int id) const {
  for (const auto& b : buses)
    if (b.id == id) return true;
  return false;
}

const BusRecord& GridCase::bus(int id) const {
  for (const auto& b : buses)
    if (b.id == id) return b;
  throw Error("no such bus: " + std::to_string(id));
}

GridCase parse_case(std::string_view raw) {
  const std::string text = strip_comments(raw);

  GridCase grid;
  grid.base_mva = parse_scalar(text, "baseMVA");
  if (!(grid.base_mva > 0.0)) {
    throw NonPositiveBase("baseMVA must be positive, got " + fmt(grid.base_mva));
  }

  const auto bus_rows = parse_matrix(text, "bus");
  if (bus_rows.empty()) throw MalformedSection("bus section is empty");
  std::set<int> seen;
  for (const auto& row : bus_rows) {
    if (row.size() < 13) throw MalformedSection("bus row has fewer than 13 columns");
    BusRecord b;
    b.id = to_bus_id(row[0], "bus");
    if (!seen.insert(b.id).second) {
      throw MalformedSection("duplicate bus id " + std::to_string(b.id));
    }
    b.gs_mw_raw = row[4];
    b.bs_mvar_raw = row[5];
    b.nominal_voltage = row[7];
    b.va_deg_raw = row[8];
    if (!(b.nominal_voltage > 0.0)) {
      throw MalformedSection("bus " + std::to_string(b.id) + " has non-positive voltage");
    }
    b.nominal_angle = b.va_deg_raw * std::numbers::pi / 180.0;
    b.shunt_g = b.gs_mw_raw / grid.base_mva;
    b.shunt_b = b.bs_mvar_raw / grid.base_mva;
    grid.buses.push_back(b);
  }

  const auto branch_rows = parse_matrix(text, "branch");
  if (branch_rows.empty()) throw MalformedSection("branch section is empty");
  std::map<int, double> charging_at_bus;
  for (const auto& row : branch_rows) {
    if (row.size() < 13) throw MalformedSection("branch row has fewer than 13 columns");
    BranchRecord br;
    br.from_bus = to_bus_id(row[0], "branch");
    br.to_bus = to_bus_id(row[1], "branch");
    br.r_raw = row[2];
    br.x_raw = row[3];
    br.charging_raw = row[4];
    const double tap = row[8];
    const double shift = row[9];
    if ((tap != 0.0 && tap != 1.0) || shift != 0.0) {
      throw UnsupportedTransformer("branch " + std::to_string(br.from_bus) + "-" +
                                   std::to_string(br.to_bus) +
                                   ": tap ratios / phase shifters are not supported");
    }
    if (br.from_bus == br.to_bus) {
      throw MalformedSection("branch connects bus " + std::to_string(br.from_bus) + " to itself");
    }
    if (!grid.has_bus(br.from_bus) || !grid.has_bus(br.to_bus)) {
      throw DanglingBranch("branch " + std::to_string(br.from_bus) + "-" +
                           std::to_string(br.to_bus) + " references a missing bus");
    }
    const double denom = br.r_raw * br.r_raw + br.x_raw * br.x_raw;
    if (denom == 0.0) {
      throw MalformedSection("branch " + std::to_string(br.from_bus) + "-" +
                             std::to_string(br.to_bus) + " has zero impedance");
    }
    br.series_g = br.r_raw / denom;
    br.series_b = -br.x_raw / denom;
    charging_at_bus[br.from_bus] += 0.5 * br.charging_raw;
    charging_at_bus[br.to_bus] += 0.5 * br.charging_raw;
    grid.branches.push_back(br);
  }
  for (auto& b : grid.buses) {
    auto it = charging_at_bus.find(b.id);
    if (it != charging_at_bus.end()) b.shunt_b += it->second;
  }
  return grid;
}

std::string dump_case(const GridCase& grid) {
  std::ostringstream os;
  os << "function mpc = dumped_case\n";
  os << "mpc.version = '2';\n";
  os << "mpc.baseMVA = " << fmt(grid.base_mva) << ";\n";
  os << "mpc.bus = [\n";
  for (const auto& b : grid.buses) {
    os << '\t' << b.id << "\t1\t0\t0\t" << fmt(b.gs_mw_raw) << '\t' << fmt(b.bs_mvar_raw)
       << "\t1\t" << fmt(b.nominal_voltage) << '\t' << fmt(b.va_deg_raw)
       << "\t0\t1\t1.06\t0.94;\n";
  }
  os << "];\n";
  os << "mpc.branch = [\n";
  for (const auto& br : grid.branches) {
    os << '\t' << br.from_bus << '\t' << br.to_bus << '\t' << fmt(br.r_raw) << '\t'
       << fmt(br.x_raw) << '\t' << fmt(br.charging_raw) << "\t0\t0\t0\t0\t0\t1\t-360\t360;\n";
  }
  os << "];\n";
  return os.str();
}

std::tuple<double, double, double, double> branch_admittance(const GridCase& grid, int from,
                                                             int to) {
  for (const auto& br : grid.branches) {
    if ((br.from_bus == from && br.to_bus == to) || (br.from_bus == to && br.to_bus == from)) {
      const BusRecord& fb = grid.bus(from);
      return {br.series_g, br.series_b, fb.shunt_g, fb.shunt_b};
    }
  }
  throw NoSuchBranch("no branch between buses " + std::to_string(from) + " and " +
                     std::to_string(to));
}

}  // namespace wasse
