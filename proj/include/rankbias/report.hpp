/**
 * @file report.hpp
 * @brief Number formatting, CSV emit/parse, and aligned text tables.
 *
 * CSV cells carry full round-trip precision; the text renderer is for eyes
 * and rounds to two decimals. Rounding is presentation-only, never fed back
 * into computation.
 */

#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rankbias/error.hpp"

namespace rankbias {

/// Shortest decimal string that parses back to exactly this double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

/// Fixed-point with the given number of decimals, for table display.
inline std::string format_fixed(double v, int decimals = 2) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) throw InvalidParams("format_fixed: value does not fit");
  return std::string(buf, ptr);
}

/// True when the whole cell parses as a double (so the text renderer may
/// reformat it).
inline bool parse_double_cell(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc{} && ptr == cell.data() + cell.size();
}

// ── tables ──────────────────────────────────────────────────────────────────

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline bool csv_needs_quotes(std::string_view cell) {
  return cell.find_first_of(",\"\n\r") != std::string_view::npos;
}

inline std::string csv_escape(std::string_view cell) {
  if (!csv_needs_quotes(cell)) return std::string(cell);
  std::string out = "\"";
  for (const char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::string render_csv(const Table& table) {
  std::string out;
  const auto emit_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += detail::csv_escape(row[i]);
    }
    out += '\n';
  };
  if (!table.header.empty()) emit_row(table.header);
  for (const auto& row : table.rows) emit_row(row);
  return out;
}

namespace detail {

inline bool integer_cell(std::string_view cell) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  return ec == std::errc{} && ptr == cell.data() + cell.size();
}

}  // namespace detail

/// Column-aligned monospace rendering. Columns whose body cells all parse as
/// numbers are right-aligned; unless every cell is an integer they are
/// reformatted to `decimals` places. Empty cells never break a column's
/// numeric status. Rounding here is presentation-only.
inline std::string render_text(const Table& table, int decimals = 2) {
  std::size_t column_count = table.header.size();
  for (const auto& row : table.rows) column_count = std::max(column_count, row.size());

  std::vector<bool> numeric_col(column_count, true);
  std::vector<bool> integer_col(column_count, true);
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].empty()) continue;
      double v = 0.0;
      if (!parse_double_cell(row[i], v)) numeric_col[i] = false;
      if (!detail::integer_cell(row[i])) integer_col[i] = false;
    }
  }

  std::vector<std::vector<std::string>> cells;
  const auto add_row = [&](const std::vector<std::string>& row, bool header) {
    std::vector<std::string> shaped;
    shaped.reserve(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      double v = 0.0;
      if (!header && numeric_col[i] && !integer_col[i] && parse_double_cell(row[i], v)) {
        shaped.push_back(format_fixed(v, decimals));
      } else {
        shaped.push_back(row[i]);
      }
    }
    cells.push_back(std::move(shaped));
  };
  if (!table.header.empty()) add_row(table.header, true);
  for (const auto& row : table.rows) add_row(row, false);

  std::vector<std::size_t> widths;
  for (const auto& row : cells) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) {
      widths[i] = std::max(widths[i], row[i].size());
    }
  }
  if (numeric_col.size() < widths.size()) numeric_col.resize(widths.size(), false);

  std::string out;
  bool is_header = !table.header.empty();
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) line += "  ";
      const std::size_t pad = widths[i] - row[i].size();
      if (numeric_col[i] && !is_header) {
        line.append(pad, ' ');
        line += row[i];
      } else {
        line += row[i];
        line.append(pad, ' ');
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
    if (is_header) {
      for (std::size_t i = 0; i < widths.size(); ++i) {
        if (i > 0) out += "  ";
        out.append(widths[i], '-');
      }
      out += '\n';
      is_header = false;
    }
  }
  return out;
}

/// Strict-enough CSV reader for re-rendering our own output: handles quoted
/// cells, doubled quotes, and embedded newlines.
inline Table parse_csv(std::string_view text) {
  Table table;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool had_any = false;
  const auto end_cell = [&]() {
    row.push_back(cell);
    cell.clear();
  };
  const auto end_row = [&]() {
    end_cell();
    if (!had_any) {
      table.header = row;
      had_any = true;
    } else {
      table.rows.push_back(row);
    }
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; break;
      case ',': end_cell(); break;
      case '\r': break;
      case '\n': end_row(); break;
      default: cell += c;
    }
  }
  if (quoted) throw ParseError("parse_csv: unterminated quote");
  if (!cell.empty() || !row.empty()) end_row();
  return table;
}

}  // namespace rankbias
