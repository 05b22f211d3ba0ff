#pragma once

// Result CSV schema shared by simulations and references:
//   t, then per matrix entry XY (row-major): re_XY, im_XY, se_re_XY, se_im_XY,
//   then n, aborted.
// Entry labels are ee, eg, ge, gg for the JC model and ++, +-, -+, -- for the
// spin bath. Reals are written with %.16e.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdpsim/config.hpp"
#include "pdpsim/ensemble.hpp"

namespace pdp {

struct CsvTable {
  std::vector<std::string> entries;
  std::vector<double> t;
  // Indexed [entry][grid point].
  std::vector<std::vector<double>> re;
  std::vector<std::vector<double>> im;
  std::vector<std::vector<double>> se_re;
  std::vector<std::vector<double>> se_im;
  std::vector<std::uint64_t> n;
  std::vector<std::uint64_t> aborted;

  /// Empty table with zeroed columns for `entries` on grid `t`.
  static CsvTable zeros(std::vector<std::string> entries, std::vector<double> t);
  std::size_t entry_index(const std::string& label) const;
};

std::vector<std::string> entry_labels(ModelKind model);

CsvTable table_from_estimate(const DensityEstimate& est, const std::vector<std::string>& labels);

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);
/// Throws with the offending line number on schema violations.
CsvTable read_csv(std::istream& in, const std::string& origin = "<csv>");
CsvTable read_csv_file(const std::string& path);

std::string format_real(double x);

}  // namespace pdp
