#include "holonomy/io.hpp"

#include <fstream>
#include <sstream>

namespace holonomy {

std::vector<RecordLine> record_lines(std::string_view text) {
  std::vector<RecordLine> out;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    ++number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::istringstream in{std::string(line)};
    RecordLine rec{number, {}};
    for (std::string f; in >> f;) rec.fields.push_back(f);
    if (!rec.fields.empty()) out.push_back(std::move(rec));
    start = end + 1;
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

int parse_int_field(const RecordLine& line, std::size_t i) {
  if (i >= line.fields.size()) throw ParseError(line.number, "missing field " + std::to_string(i + 1));
  const auto& s = line.fields[i];
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(line.number, "expected an integer, got '" + s + "'");
}

double parse_double_field(const RecordLine& line, std::size_t i) {
  if (i >= line.fields.size()) throw ParseError(line.number, "missing field " + std::to_string(i + 1));
  try {
    return parse_scalar<double>(line.fields[i]);
  } catch (const ValidationError&) {
    throw ParseError(line.number, "expected a number, got '" + line.fields[i] + "'");
  }
}

ProfileRecord parse_profile(std::string_view text) {
  std::map<std::string, const RecordLine*> fields;
  std::vector<double> r, f;
  const auto lines = record_lines(text);
  for (const auto& line : lines) {
    const auto& key = line.fields[0];
    if (key == "sample") {
      if (line.fields.size() != 3) throw ParseError(line.number, "expected 'sample <r> <f>'");
      r.push_back(parse_double_field(line, 1));
      f.push_back(parse_double_field(line, 2));
      continue;
    }
    static const char* known[] = {"name", "n", "kind", "c", "nu", "r0", "rmax", "nodes", "link_volume"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw ParseError(line.number, "unknown profile field '" + key + "'");
    if (line.fields.size() != 2) throw ParseError(line.number, "expected '" + key + " <value>'");
    fields[key] = &line;
  }
  auto need = [&](const char* key) -> const RecordLine& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(0, std::string("profile record needs '") + key + "'");
    return *it->second;
  };
  const std::string kind = need("kind").fields[1];
  const int n = parse_int_field(need("n"), 1);
  std::optional<WarpedMetric> metric;
  if (kind == "euclidean") {
    metric = WarpedMetric::euclidean(n, parse_double_field(need("r0"), 1), parse_double_field(need("rmax"), 1));
  } else if (kind == "perturbed_cone") {
    metric = WarpedMetric::perturbed_cone(n, parse_double_field(need("c"), 1), parse_double_field(need("nu"), 1),
                                          parse_double_field(need("r0"), 1), parse_double_field(need("rmax"), 1));
  } else if (kind == "tabulated") {
    std::optional<double> rate;
    if (fields.count("nu")) rate = parse_double_field(*fields["nu"], 1);
    metric = WarpedMetric::tabulated(n, r, f, rate);
  } else {
    throw ParseError(need("kind").number, "unknown profile kind '" + kind + "'");
  }
  if (fields.count("link_volume")) metric->set_link_volume(parse_double_field(*fields["link_volume"], 1));
  ProfileRecord out{fields.count("name") ? fields["name"]->fields[1] : kind, *metric, 10000};
  if (fields.count("nodes")) out.nodes = parse_int_field(*fields["nodes"], 1);
  return out;
}

std::vector<SpectrumEntry> parse_spectrum(std::string_view text) {
  std::vector<SpectrumEntry> out;
  for (const auto& line : record_lines(text)) {
    if (line.fields.size() > 2) throw ParseError(line.number, "expected '<mu> [multiplicity]'");
    SpectrumEntry e{parse_double_field(line, 0), 1};
    if (line.fields.size() == 2) e.multiplicity = parse_int_field(line, 1);
    out.push_back(e);
  }
  return out;
}

}  // namespace holonomy
