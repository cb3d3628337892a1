#pragma once

#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace wasse {

/// One bus of a parsed case.
///
/// `shunt_b` aggregates the bus shunt from the bus table (Bs / base) plus half
/// of the charging susceptance of every incident branch — the per-bus shunt
/// term the branch-flow measurement model uses. Raw file columns are kept so a
/// dump re-parses to the identical record.
struct BusRecord {
  int id = 0;
  double nominal_voltage = 1.0;  ///< per-unit magnitude (Vm column)
  double nominal_angle = 0.0;    ///< radians (Va column converted)
  double shunt_g = 0.0;          ///< per-unit conductance g_s
  double shunt_b = 0.0;          ///< per-unit susceptance b_s (incl. half charging)
  // original file values (for serialization round-trips)
  double va_deg_raw = 0.0;
  double gs_mw_raw = 0.0;
  double bs_mvar_raw = 0.0;
};

/// One branch; series admittance g + jb = 1 / (r + jx).
struct BranchRecord {
  int from_bus = 0;
  int to_bus = 0;
  double series_g = 0.0;
  double series_b = 0.0;
  double r_raw = 0.0;
  double x_raw = 0.0;
  double charging_raw = 0.0;  ///< total line charging susceptance (p.u.)
};

struct GridCase {
  double base_mva = 0.0;
  std::vector<BusRecord> buses;      ///< file order preserved
  std::vector<BranchRecord> branches;  ///< file order preserved

  bool has_bus(int id) const;
  const BusRecord& bus(int id) const;  ///< throws Error if the id is absent
};

/// Parse a MATPOWER-style case text (baseMVA / bus / branch sections; other
/// sections such as gen or gencost are ignored). Comments start with '%'.
/// Throws MalformedSection, NonPositiveBase, DanglingBranch,
/// UnsupportedTransformer per the respective defect.
GridCase parse_case(std::string_view text);

/// Debug dump in the same subset format; parse(dump_case(parse(text)))
/// reproduces the records of parse(text) exactly.
std::string dump_case(const GridCase& grid);

/// Bundled fixture by name: "ieee14" or "ieee39".
const GridCase& load_bundled(std::string_view name);
/// Raw fixture text (exposed for parser tests).
std::string_view bundled_case_text(std::string_view name);

/// (series_g, series_b, shunt_g_at_from, shunt_b_at_from) for the branch
/// between `from` and `to` (either orientation). Throws NoSuchBranch.
std::tuple<double, double, double, double> branch_admittance(const GridCase& grid,
                                                             int from, int to);

}  // namespace wasse
