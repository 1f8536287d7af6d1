#include "gammalab/cli/table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace gammalab::cli {

std::optional<Format> parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  return std::nullopt;
}

void Table::add_column(std::string name, CellKind kind) {
  columns_.push_back({std::move(name), kind});
  for (auto& row : rows_) row.emplace_back();
}

void Table::add_bounded_column(const std::string& name) {
  add_column(name);
  add_column(name + "_err");
}

void Table::begin_row() { rows_.emplace_back(columns_.size()); }

std::size_t Table::index_of(const std::string& column) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == column) return i;
  }
  throw std::out_of_range("no column " + column);
}

Table& Table::set(const std::string& column, Cell value) {
  if (rows_.empty()) throw std::logic_error("set before begin_row");
  rows_.back()[index_of(column)] = std::move(value);
  return *this;
}

Table& Table::set(const std::string& column, long long value) {
  return set(column, Cell(std::to_string(value)));
}

Table& Table::set_bool(const std::string& column, bool value) {
  return set(column, Cell(value ? "true" : "false"));
}

Table& Table::set_bounded(const std::string& name, const mp::Bounded& value) {
  const DecimalField f = format_bounded(value);
  set(name, f.value);
  return set(name + "_err", f.err);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out << (i ? "," : "") << csv_escape(columns_[i].name);
  }
  out << "\r\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << (row[i] ? csv_escape(*row[i]) : "");
    }
    out << "\r\n";
  }
}

void Table::write_json(std::ostream& out) const {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Column& col = columns_[i];
      if (!row[i]) {
        obj[col.name] = nullptr;
      } else if (col.kind == CellKind::integer) {
        obj[col.name] = std::stoll(*row[i]);
      } else if (col.kind == CellKind::boolean) {
        obj[col.name] = *row[i] == "true";
      } else {
        obj[col.name] = *row[i];
      }
    }
    rows.push_back(std::move(obj));
  }
  out << rows.dump(2) << '\n';
}

void Table::write(std::ostream& out, Format format) const {
  if (format == Format::csv) {
    write_csv(out);
  } else {
    write_json(out);
  }
}

Rat decimal_to_rat(const std::string& text) {
  std::string mantissa = text;
  long exponent = 0;
  const auto e = text.find_first_of("eE");
  if (e != std::string::npos) {
    mantissa = text.substr(0, e);
    exponent = std::stol(text.substr(e + 1));
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
    negative = mantissa[0] == '-';
    mantissa.erase(0, 1);
  }
  const auto dot = mantissa.find('.');
  if (dot != std::string::npos) {
    exponent -= static_cast<long>(mantissa.size() - dot - 1);
    mantissa.erase(dot, 1);
  }
  if (mantissa.empty() || !std::all_of(mantissa.begin(), mantissa.end(), ::isdigit)) {
    throw std::invalid_argument("not a decimal number: " + text);
  }
  Int digits;
  if (digits.set_str(mantissa, 10) != 0) throw std::invalid_argument("not a decimal number: " + text);
  Int scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rat q = exponent >= 0 ? Rat(digits * scale) : Rat(digits, scale);
  q.canonicalize();
  return negative ? Rat(-q) : q;
}

DecimalField format_bounded(const mp::Bounded& x) {
  const int max_digits = static_cast<int>(std::ceil(x.value.precision() * 0.30103)) + 1;
  int digits = max_digits;
  if (!x.err.is_zero() && !x.value.is_zero()) {
    const double rel = x.err.to_double() / std::fabs(x.value.to_double());
    if (rel > 0 && std::isfinite(rel)) {
      digits = std::clamp(static_cast<int>(std::floor(-std::log10(rel))) + 2, 1, max_digits);
    }
  }
  DecimalField f;
  f.value = x.value.is_zero() ? "0" : x.value.to_decimal(digits);

  Rat exact_value;
  mpfr_get_q(exact_value.get_mpq_t(), x.value.get());
  mp::ErrBound err = x.err + mp::ErrBound::upper(Rat(decimal_to_rat(f.value) - exact_value));
  f.err = err.to_string(3);
  return f;
}

}  // namespace gammalab::cli
