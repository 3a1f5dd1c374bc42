#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "urnlab/chain_kernel.hpp"
#include "urnlab/couplings.hpp"
#include "urnlab/mixing.hpp"
#include "urnlab/verification.hpp"

namespace urnlab {

inline constexpr std::string_view kArtifactVersion = "urnlab 1.0.0";

/// Missing values print as NA in CSV and null in JSON.
using Cell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Ordered key/value pairs describing a run.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Doubles at 17 significant digits.
std::string format_double(double x);
std::string format_cell(const Cell& c);

/// Metadata as leading "# key: value" lines, then header and rows.
void write_csv(std::ostream& os, const Table& table, const Metadata& meta = {});

/// JSON array of row objects, keys in column order.
void write_json(std::ostream& os, const Table& table);

/// JSON object of the metadata entries.
void write_metadata_json(std::ostream& os, const Metadata& meta);

Table kernel_table(const BandedKernel& kernel);

/// Parses a kernel CSV (comment lines skipped). n is the largest row index
/// and k the widest band offset.
BandedKernel read_kernel_csv(std::istream& is);

Table profile_table(const MixingProfile& profile);
Table cutoff_table(const std::vector<CutoffScanRecord>& records);

/// gaps[replica][t] for t = 0, 1, ...
Table couple_table(std::uint64_t seed, const std::vector<std::vector<int>>& gaps);
Table four_phase_table(std::uint64_t seed, const std::vector<FourPhaseRecord>& records);

/// Columns name, n, k, statistic, bound, direction, tolerance, passed,
/// replicas, seed.
Table report_table(const std::vector<CheckReport>& reports);

}  // namespace urnlab
