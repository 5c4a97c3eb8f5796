#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace fbst::cli {

using Cell = std::variant<double, std::int64_t, std::uint64_t, bool, std::string>;

/// Column-oriented result: every command's output goes through one of these
/// so CSV and JSON stay in sync.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// 12 significant digits, '.' decimal point, no grouping; locale-independent.
std::string format_number(double value, int significant = 12);

/// RFC 4180: fields with commas, quotes or line breaks are quoted and inner
/// quotes doubled. The header is always written; lines end in '\n'.
void write_csv(const Table& table, std::ostream& out);

/// Array of row objects keyed by header. Doubles keep full precision.
nlohmann::ordered_json to_json(const Table& table);

std::string csv_escape(const std::string& field);

}  // namespace fbst::cli
