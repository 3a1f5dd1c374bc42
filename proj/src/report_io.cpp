#include "urnlab/report_io.hpp"

#include <fmt/format.h>

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace urnlab {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else {
          return v;
        }
      },
      c);
}

Cell optional_cell(const std::optional<std::int64_t>& v) {
  if (v) return *v;
  return std::monostate{};
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string format_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "NA";
        } else if constexpr (std::is_same_v<T, std::int64_t> ||
                             std::is_same_v<T, std::uint64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return v;
        }
      },
      c);
}

void write_csv(std::ostream& os, const Table& table, const Metadata& meta) {
  for (const auto& [key, value] : meta) os << "# " << key << ": " << value << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
}

void write_json(std::ostream& os, const Table& table) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < table.columns.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
    arr.push_back(std::move(obj));
  }
  os << arr.dump(2) << '\n';
}

void write_metadata_json(std::ostream& os, const Metadata& meta) {
  ordered_json obj = ordered_json::object();
  for (const auto& [key, value] : meta) obj[key] = value;
  os << obj.dump(2) << '\n';
}

Table kernel_table(const BandedKernel& kernel) {
  Table t{{"i", "j", "p"}, {}};
  for (int i = 0; i <= kernel.n(); ++i) {
    const auto row = kernel.row(i);
    for (int j = kernel.row_lo(i); j <= kernel.row_hi(i); ++j) {
      t.rows.push_back({std::int64_t{i}, std::int64_t{j},
                        row[static_cast<std::size_t>(j - kernel.row_lo(i))]});
    }
  }
  return t;
}

BandedKernel read_kernel_csv(std::istream& is) {
  std::string line;
  bool header = false;
  std::map<int, std::map<int, double>> entries;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "i,j,p") throw std::runtime_error("kernel csv: expected header i,j,p");
      header = true;
      continue;
    }
    std::istringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw std::runtime_error("kernel csv: malformed line " + std::to_string(line_no));
    }
    entries[std::stoi(a)][std::stoi(b)] = std::stod(c);
  }
  if (entries.empty()) throw std::runtime_error("kernel csv: no rows");
  const int n = entries.rbegin()->first;
  int k = 0;
  for (const auto& [i, row] : entries) {
    for (const auto& [j, p] : row) k = std::max(k, std::abs(j - i));
  }
  const ChainParams params{n, k};
  params.validate();
  std::vector<std::vector<double>> rows;
  for (int i = 0; i <= n; ++i) {
    const int lo = std::max(0, i - k);
    const int hi = std::min(n, i + k);
    std::vector<double> row(static_cast<std::size_t>(hi - lo + 1), 0.0);
    auto it = entries.find(i);
    if (it == entries.end()) throw std::runtime_error("kernel csv: missing row " + std::to_string(i));
    for (const auto& [j, p] : it->second) row[static_cast<std::size_t>(j - lo)] = p;
    rows.push_back(std::move(row));
  }
  return BandedKernel(params, std::move(rows));
}

Table profile_table(const MixingProfile& profile) {
  Table t{{"n", "k", "t", "d"}, {}};
  for (std::size_t i = 0; i < profile.times.size(); ++i) {
    t.rows.push_back({std::int64_t{profile.params.n}, std::int64_t{profile.params.k},
                      profile.times[i], profile.distances[i]});
  }
  return t;
}

Table cutoff_table(const std::vector<CutoffScanRecord>& records) {
  Table t{{"n", "k", "eps", "t_mix", "t_star", "ratio", "nw_upper", "nw_ok"}, {}};
  for (const auto& r : records) {
    t.rows.push_back({std::int64_t{r.n}, std::int64_t{r.k}, r.eps, optional_cell(r.t_mix), r.t_star,
                      r.t_mix ? Cell{r.ratio} : Cell{}, r.nw_upper, r.nw_ok});
  }
  return t;
}

Table couple_table(std::uint64_t seed, const std::vector<std::vector<int>>& gaps) {
  Table t{{"seed", "replica", "t", "gap"}, {}};
  for (std::size_t r = 0; r < gaps.size(); ++r) {
    for (std::size_t i = 0; i < gaps[r].size(); ++i) {
      t.rows.push_back({seed, static_cast<std::int64_t>(r), static_cast<std::int64_t>(i),
                        std::int64_t{gaps[r][i]}});
    }
  }
  return t;
}

Table four_phase_table(std::uint64_t seed, const std::vector<FourPhaseRecord>& records) {
  Table t{{"seed", "replica", "tau1", "tau2", "tau3", "tau4", "censored_phase", "final_gap",
           "last_step_tv"},
          {}};
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    t.rows.push_back({seed, static_cast<std::int64_t>(r), optional_cell(rec.tau1),
                      optional_cell(rec.tau2), optional_cell(rec.tau3), optional_cell(rec.tau4),
                      std::int64_t{rec.censored_phase}, std::int64_t{rec.final_gap},
                      rec.last_step_tv});
  }
  return t;
}

Table report_table(const std::vector<CheckReport>& reports) {
  Table t{{"name", "n", "k", "statistic", "bound", "direction", "tolerance", "passed", "replicas",
           "seed"},
          {}};
  for (const auto& r : reports) {
    t.rows.push_back({r.name, std::int64_t{r.n}, std::int64_t{r.k}, r.statistic, r.bound,
                      r.direction, r.tolerance, r.passed, r.replicas, r.seed});
  }
  return t;
}

}  // namespace urnlab
