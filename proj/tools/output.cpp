#include "output.hpp"

#include <cstdio>
#include <string>

namespace fbst::cli {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string cell_text(const Cell& cell) {
  return std::visit(
      Overloaded{
          [](double v) { return format_number(v); },
          [](std::int64_t v) { return std::to_string(v); },
          [](std::uint64_t v) { return std::to_string(v); },
          [](bool v) { return std::string(v ? "true" : "false"); },
          [](const std::string& v) { return v; },
      },
      cell);
}

}  // namespace

std::string format_number(double value, int significant) {
  // snprintf honours LC_NUMERIC; the tool never calls setlocale, so this
  // stays in the "C" locale.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, value);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(table.header[i]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(cell_text(row[i]));
    }
    out << '\n';
  }
}

nlohmann::ordered_json to_json(const Table& table) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < table.header.size(); ++i) {
      std::visit([&](const auto& v) { obj[table.header[i]] = v; }, row[i]);
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

}  // namespace fbst::cli
