#include "pdpsim/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pdp {

CsvTable CsvTable::zeros(std::vector<std::string> entries, std::vector<double> t) {
  CsvTable tab;
  const std::size_t ng = t.size();
  const std::size_t ne = entries.size();
  tab.entries = std::move(entries);
  tab.t = std::move(t);
  tab.re.assign(ne, std::vector<double>(ng, 0.0));
  tab.im = tab.re;
  tab.se_re = tab.re;
  tab.se_im = tab.re;
  tab.n.assign(ng, 0);
  tab.aborted.assign(ng, 0);
  return tab;
}

std::size_t CsvTable::entry_index(const std::string& label) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i] == label) return i;
  fail(ErrorKind::Configuration, "no entry '" + label + "' in table");
}

std::vector<std::string> entry_labels(ModelKind model) {
  if (model == ModelKind::Jc) return {"ee", "eg", "ge", "gg"};
  return {"++", "+-", "-+", "--"};
}

CsvTable table_from_estimate(const DensityEstimate& est, const std::vector<std::string>& labels) {
  const auto d = static_cast<std::size_t>(est.dim);
  if (labels.size() != d * d) fail(ErrorKind::Configuration, "label count does not match dimension");
  CsvTable tab = CsvTable::zeros(labels, est.t);
  for (std::size_t g = 0; g < est.t.size(); ++g) {
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const auto r = static_cast<Eigen::Index>(i);
        const auto c = static_cast<Eigen::Index>(j);
        const std::size_t e = i * d + j;
        tab.re[e][g] = est.mean[g](r, c).real();
        tab.im[e][g] = est.mean[g](r, c).imag();
        tab.se_re[e][g] = est.se_re[g](r, c);
        tab.se_im[e][g] = est.se_im[g](r, c);
      }
    tab.n[g] = est.n;
    tab.aborted[g] = est.aborted;
  }
  return tab;
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

void write_csv(std::ostream& out, const CsvTable& tab) {
  out << "t";
  for (const auto& e : tab.entries)
    out << ",re_" << e << ",im_" << e << ",se_re_" << e << ",se_im_" << e;
  out << ",n,aborted\n";
  for (std::size_t g = 0; g < tab.t.size(); ++g) {
    out << format_real(tab.t[g]);
    for (std::size_t e = 0; e < tab.entries.size(); ++e)
      out << ',' << format_real(tab.re[e][g]) << ',' << format_real(tab.im[e][g]) << ','
          << format_real(tab.se_re[e][g]) << ',' << format_real(tab.se_im[e][g]);
    out << ',' << tab.n[g] << ',' << tab.aborted[g] << '\n';
  }
  if (!out) fail(ErrorKind::Io, "failed writing CSV");
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  write_csv(out, table);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    fail(ErrorKind::Io, where + ": malformed number '" + s + "'");
  return x;
}

std::uint64_t parse_count(const std::string& s, const std::string& where) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
    fail(ErrorKind::Io, where + ": malformed count '" + s + "'");
  return x;
}

}  // namespace

CsvTable read_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Io, origin + ":1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto head = split(line);
  if (head.size() < 3 || (head.size() - 3) % 4 != 0 || head.front() != "t" ||
      head[head.size() - 2] != "n" || head.back() != "aborted")
    fail(ErrorKind::Io, origin + ":1: header does not match the result schema");
  const std::size_t ne = (head.size() - 3) / 4;
  std::vector<std::string> entries;
  for (std::size_t e = 0; e < ne; ++e) {
    const std::string& c0 = head[1 + 4 * e];
    if (c0.rfind("re_", 0) != 0)
      fail(ErrorKind::Io, origin + ":1: expected re_ column, got '" + c0 + "'");
    const std::string label = c0.substr(3);
    if (head[2 + 4 * e] != "im_" + label || head[3 + 4 * e] != "se_re_" + label ||
        head[4 + 4 * e] != "se_im_" + label)
      fail(ErrorKind::Io, origin + ":1: columns for entry '" + label + "' out of order");
    entries.push_back(label);
  }

  CsvTable tab = CsvTable::zeros(entries, {});
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    const auto cells = split(line);
    if (cells.size() != head.size())
      fail(ErrorKind::Io, where + ": expected " + std::to_string(head.size()) + " fields, got " +
                              std::to_string(cells.size()));
    tab.t.push_back(parse_real(cells[0], where));
    for (std::size_t e = 0; e < ne; ++e) {
      tab.re[e].push_back(parse_real(cells[1 + 4 * e], where));
      tab.im[e].push_back(parse_real(cells[2 + 4 * e], where));
      tab.se_re[e].push_back(parse_real(cells[3 + 4 * e], where));
      tab.se_im[e].push_back(parse_real(cells[4 + 4 * e], where));
    }
    tab.n.push_back(parse_count(cells[cells.size() - 2], where));
    tab.aborted.push_back(parse_count(cells.back(), where));
  }
  return tab;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  return read_csv(in, path);
}

}  // namespace pdp
