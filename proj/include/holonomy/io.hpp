#pragma once

// Text records. Lines are whitespace-separated fields; '#' starts a comment.
//
//   form:      n 7 / k 3 / "1,2,3 1" per nonzero coefficient ("3/2" and "0.25" both parse)
//   symmetric: n 3 / optional "orientation -1" / n rows of n entries
//   bundle:    "[name]" headers, each followed by a form record
//   profile:   name, n, kind (euclidean | perturbed_cone | tabulated), c, nu, r0, rmax,
//              nodes, and "sample r f" lines for tabulated profiles
//   spectrum:  "mu [multiplicity]" per line

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "holonomy/errors.hpp"
#include "holonomy/kform.hpp"
#include "holonomy/radial.hpp"
#include "holonomy/scalar.hpp"

namespace holonomy {

struct RecordLine {
  int number = 0;
  std::vector<std::string> fields;
};

std::vector<RecordLine> record_lines(std::string_view text);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

int parse_int_field(const RecordLine& line, std::size_t i);
double parse_double_field(const RecordLine& line, std::size_t i);

template <class Scalar>
Scalar parse_scalar_field(const RecordLine& line, std::size_t i) {
  if (i >= line.fields.size()) throw ParseError(line.number, "missing field " + std::to_string(i + 1));
  try {
    return parse_scalar<Scalar>(line.fields[i]);
  } catch (const ValidationError& e) {
    throw ParseError(line.number, e.what());
  }
}

// ------------------------------------------------------------------ forms

template <class Scalar>
KForm<Scalar> parse_form_lines(const std::vector<RecordLine>& lines) {
  std::optional<int> n, k;
  std::vector<std::pair<const RecordLine*, std::vector<int>>> entries;
  for (const auto& line : lines) {
    const auto& key = line.fields[0];
    if (key == "n" || key == "k") {
      if (line.fields.size() != 2) throw ParseError(line.number, "expected '" + key + " <integer>'");
      (key == "n" ? n : k) = parse_int_field(line, 1);
      continue;
    }
    if (line.fields.size() != 2) throw ParseError(line.number, "expected '<indices> <coefficient>'");
    std::vector<int> idx;
    std::string_view s = key;
    while (!s.empty()) {
      const auto comma = s.find(',');
      const std::string part(s.substr(0, comma));
      try {
        std::size_t used = 0;
        idx.push_back(std::stoi(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw ParseError(line.number, "bad index tuple '" + key + "'");
      }
      s = comma == std::string_view::npos ? std::string_view{} : s.substr(comma + 1);
    }
    entries.emplace_back(&line, std::move(idx));
  }
  if (!n || !k) throw ParseError(lines.empty() ? 0 : lines.front().number, "form record needs 'n' and 'k'");
  if (*n < 1 || *n > 8) throw ParseError(0, "form dimension must be in 1..8");
  if (*k < 0 || *k > *n) throw ParseError(0, "form degree must be in 0..n");
  KForm<Scalar> out(*n, *k);
  for (const auto& [line, idx] : entries) {
    if (static_cast<int>(idx.size()) != *k)
      throw ParseError(line->number, "index tuple has " + std::to_string(idx.size()) + " entries, expected " +
                                         std::to_string(*k));
    for (int i : idx)
      if (i < 1 || i > *n) throw ParseError(line->number, "index " + std::to_string(i) + " out of range");
    const Scalar c = parse_scalar_field<Scalar>(*line, 1);
    if (*k == 0) {
      out = out + KForm<Scalar>::constant(*n, c);
      continue;
    }
    const KForm<Scalar> term = KForm<Scalar>::basis(*n, idx, c);
    if (term.is_zero() && !is_zero(c)) throw ParseError(line->number, "repeated index in '" + line->fields[0] + "'");
    out = out + term;
  }
  return out;
}

template <class Scalar>
KForm<Scalar> parse_form(std::string_view text) {
  return parse_form_lines<Scalar>(record_lines(text));
}

template <class Scalar>
KForm<Scalar> load_form(const std::string& path) {
  return parse_form<Scalar>(read_text_file(path));
}

template <class Scalar>
std::string format_form(const KForm<Scalar>& a) {
  std::string out = "n " + std::to_string(a.dim()) + "\nk " + std::to_string(a.degree()) + "\n";
  const auto& b = a.basis_table();
  for (int i = 0; i < b.size(); ++i) {
    if (is_zero(a.coeffs()(i))) continue;
    out += (a.degree() == 0 ? std::string("0") : format_indices(b.masks[i])) + " " + format_scalar(a.coeffs()(i)) + "\n";
  }
  return out;
}

// ------------------------------------------------------------------ symmetric arrays

template <class Scalar>
std::string format_matrix(const MatrixX<Scalar>& m) {
  std::string out;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out += (j ? " " : "") + format_scalar(m(i, j));
    out += "\n";
  }
  return out;
}

template <class Scalar>
struct SymmetricRecord {
  MatrixX<Scalar> entries;
  int orientation = 1;
};

template <class Scalar>
SymmetricRecord<Scalar> parse_symmetric(std::string_view text) {
  const auto lines = record_lines(text);
  SymmetricRecord<Scalar> out;
  std::optional<int> n;
  int row = 0;
  for (const auto& line : lines) {
    if (line.fields[0] == "n") {
      n = parse_int_field(line, 1);
      if (*n < 1 || *n > 16) throw ParseError(line.number, "dimension out of range");
      out.entries = MatrixX<Scalar>::Zero(*n, *n);
      continue;
    }
    if (line.fields[0] == "orientation") {
      const int o = parse_int_field(line, 1);
      if (o != 1 && o != -1) throw ParseError(line.number, "orientation must be 1 or -1");
      out.orientation = o;
      continue;
    }
    if (!n) throw ParseError(line.number, "'n' must precede the rows");
    if (row >= *n) throw ParseError(line.number, "too many rows");
    if (static_cast<int>(line.fields.size()) != *n)
      throw ParseError(line.number, "row has " + std::to_string(line.fields.size()) + " entries, expected " +
                                        std::to_string(*n));
    for (int j = 0; j < *n; ++j) out.entries(row, j) = parse_scalar_field<Scalar>(line, j);
    ++row;
  }
  if (!n) throw ParseError(0, "symmetric record needs 'n'");
  if (row != *n) throw ParseError(lines.back().number, "expected " + std::to_string(*n) + " rows");
  if (!is_symmetric(out.entries, 1e-12)) throw ValidationError("array is not symmetric");
  return out;
}

template <class Scalar>
Metric<Scalar> parse_metric(std::string_view text) {
  auto rec = parse_symmetric<Scalar>(text);
  return Metric<Scalar>(rec.entries, rec.orientation);
}

template <class Scalar>
std::string format_symmetric(const MatrixX<Scalar>& m, int orientation = 1) {
  std::string out = "n " + std::to_string(m.rows()) + "\n";
  if (orientation != 1) out += "orientation -1\n";
  return out + format_matrix(m);
}

// ------------------------------------------------------------------ bundles

template <class Scalar>
std::map<std::string, KForm<Scalar>> parse_bundle(std::string_view text) {
  std::map<std::string, std::vector<RecordLine>> sections;
  std::vector<std::string> order;
  std::string current;
  for (auto& line : record_lines(text)) {
    const auto& head = line.fields[0];
    if (head.front() == '[') {
      std::string joined;
      for (const auto& f : line.fields) joined += (joined.empty() ? "" : " ") + f;
      if (joined.back() != ']' || joined.size() < 3) throw ParseError(line.number, "bad section header");
      current = joined.substr(1, joined.size() - 2);
      if (sections.count(current)) throw ParseError(line.number, "duplicate section '" + current + "'");
      sections[current];
      continue;
    }
    if (current.empty()) throw ParseError(line.number, "record outside a [section]");
    sections[current].push_back(std::move(line));
  }
  std::map<std::string, KForm<Scalar>> out;
  for (const auto& [name, lines] : sections) out.emplace(name, parse_form_lines<Scalar>(lines));
  return out;
}

template <class Scalar>
std::string format_bundle(const std::map<std::string, KForm<Scalar>>& bundle) {
  std::string out;
  for (const auto& [name, form] : bundle) out += "[" + name + "]\n" + format_form(form);
  return out;
}

// ------------------------------------------------------------------ radial records

struct ProfileRecord {
  std::string name;
  WarpedMetric metric;
  int nodes = 10000;
};

ProfileRecord parse_profile(std::string_view text);
std::vector<SpectrumEntry> parse_spectrum(std::string_view text);

}  // namespace holonomy
