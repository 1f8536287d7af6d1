#pragma once

// Row-oriented data files. Every floating value is written as a decimal
// string next to an error field bounding |printed - true value|.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gammalab/mp.hpp"

namespace gammalab::cli {

enum class Format { csv, json };

std::optional<Format> parse_format(std::string_view name);

enum class CellKind { integer, boolean, text };

struct Column {
  std::string name;
  CellKind kind = CellKind::text;
};

// Empty optional = missing value (empty CSV field, JSON null).
using Cell = std::optional<std::string>;

class Table {
 public:
  void add_column(std::string name, CellKind kind = CellKind::text);
  // Adds "<name>" and "<name>_err".
  void add_bounded_column(const std::string& name);

  void begin_row();
  Table& set(const std::string& column, Cell value);
  Table& set(const std::string& column, long long value);
  Table& set_bool(const std::string& column, bool value);
  // Fills "<name>" and "<name>_err".
  Table& set_bounded(const std::string& name, const mp::Bounded& value);

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
  void write(std::ostream& out, Format format) const;

 private:
  std::size_t index_of(const std::string& column) const;

  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
};

struct DecimalField {
  std::string value;
  std::string err;  // upper bound on |value - true|, scientific, rounded up
};

// Prints only the digits the error bound supports (at least one), and folds
// the decimal rounding into the printed error.
DecimalField format_bounded(const mp::Bounded& x);

// Exact rational value of a decimal string such as "-1.25e-3".
Rat decimal_to_rat(const std::string& text);

std::string csv_escape(const std::string& field);

}  // namespace gammalab::cli
