#include "semantify/kgexport.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "semantify/error.hpp"
#include "semantify/text.hpp"

namespace semantify {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::gold: return "gold";
    case Provenance::predicted: return "predicted";
    case Provenance::curated: return "curated";
  }
  return "gold";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "gold") return Provenance::gold;
  if (name == "predicted") return Provenance::predicted;
  if (name == "curated") return Provenance::curated;
  throw ParseError("unknown provenance \"" + std::string(name) + "\"");
}

std::string TripleSet::subject_for(std::string_view assay_id) {
  return "bioassay:" + std::string(assay_id);
}

bool TripleSet::insert(const SemanticStatement& statement, Provenance provenance) {
  Triple t{subject(), statement.predicate, statement.object, provenance};
  const auto key = [](const Triple& x) { return std::tie(x.predicate, x.object); };
  const auto it = std::lower_bound(triples_.begin(), triples_.end(), t,
                                   [&](const Triple& a, const Triple& b) { return key(a) < key(b); });
  if (it != triples_.end() && key(*it) == key(t)) {
    return false;
  }
  triples_.insert(it, std::move(t));
  return true;
}

TripleSet export_triples(std::string_view assay_id, std::span<const SemanticStatement> statements,
                         Provenance provenance) {
  TripleSet set{std::string(assay_id)};
  for (const auto& s : statements) {
    set.insert(make_statement(s.predicate, s.object), provenance);
  }
  return set;
}

void write_triples(std::ostream& out, const TripleSet& set) {
  for (const auto& t : set.triples()) {
    out << text::escape_field(t.subject) << '\t' << text::escape_field(t.predicate) << '\t'
        << text::escape_field(t.object) << '\t' << to_string(t.provenance) << '\n';
  }
}

TripleSet read_triples(std::istream& in, std::string_view source_name) {
  constexpr std::string_view kPrefix = "bioassay:";
  TripleSet set;
  bool first = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto where = std::string(source_name) + ":" + std::to_string(line_no);
    const auto fields = text::split(line, '\t');
    if (fields.size() != 4) {
      throw ParseError("expected 4 tab-separated fields, got " + std::to_string(fields.size()),
                       where);
    }
    std::string subject;
    try {
      subject = text::unescape_field(fields[0]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), where);
    }
    if (!subject.starts_with(kPrefix)) {
      throw ParseError("subject must start with \"bioassay:\"", where);
    }
    const auto id = subject.substr(kPrefix.size());
    if (first) {
      set = TripleSet(id);
      first = false;
    } else if (id != set.assay_id()) {
      throw ParseError("subject changes from " + set.subject() + " to " + subject, where);
    }
    try {
      const auto s = make_statement(text::unescape_field(fields[1]), text::unescape_field(fields[2]));
      if (s.predicate != text::unescape_field(fields[1]) || s.object != text::unescape_field(fields[2])) {
        throw ParseError("triple fields are not in canonical form", where);
      }
      set.insert(s, parse_provenance(fields[3]));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), where);
    }
  }
  return set;
}

void write_triples_file(const TripleSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write triples to " + path.string());
  }
  write_triples(out, set);
  if (!out) {
    throw IoError("failed writing triples to " + path.string());
  }
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& ComparisonTable::cell(std::string_view predicate,
                                                      std::string_view assay) const {
  static const std::vector<std::string> kEmpty;
  const auto row = std::find(predicates.begin(), predicates.end(), predicate);
  const auto col = std::find(assays.begin(), assays.end(), assay);
  if (row == predicates.end() || col == assays.end()) {
    return kEmpty;
  }
  return cells[static_cast<std::size_t>(row - predicates.begin())]
              [static_cast<std::size_t>(col - assays.begin())];
}

ComparisonTable compare_assays(std::span<const TripleSet> sets) {
  if (sets.size() < 2) {
    throw UsageError("a comparison needs at least two assays");
  }
  ComparisonTable table;
  std::map<std::string, std::vector<std::vector<std::string>>> rows;
  for (std::size_t c = 0; c < sets.size(); ++c) {
    table.assays.push_back(sets[c].assay_id());
    for (const auto& t : sets[c].triples()) {
      auto& row = rows[t.predicate];
      row.resize(sets.size());
      row[c].push_back(t.object);
    }
  }
  for (auto& [predicate, row] : rows) {
    row.resize(sets.size());
    for (auto& cell : row) {
      std::sort(cell.begin(), cell.end());
    }
    table.predicates.push_back(predicate);
    table.cells.push_back(std::move(row));
  }
  return table;
}

std::string comparison_json(const ComparisonTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < table.predicates.size(); ++r) {
    nlohmann::json values = nlohmann::json::object();
    for (std::size_t c = 0; c < table.assays.size(); ++c) {
      values[table.assays[c]] = table.cells[r][c];
    }
    rows.push_back({{"predicate", table.predicates[r]}, {"values", std::move(values)}});
  }
  const nlohmann::json doc = {{"assays", table.assays}, {"rows", std::move(rows)}};
  return doc.dump(2);
}

std::string render_comparison_text(const ComparisonTable& table) {
  const auto columns = table.assays.size() + 1;
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"predicate"};
  for (const auto& a : table.assays) {
    header.push_back(TripleSet::subject_for(a));
  }
  grid.push_back(std::move(header));
  for (std::size_t r = 0; r < table.predicates.size(); ++r) {
    std::vector<std::string> row{table.predicates[r]};
    for (const auto& cell : table.cells[r]) {
      std::string joined;
      for (const auto& v : cell) {
        joined += (joined.empty() ? "" : "; ") + v;
      }
      row.push_back(cell.empty() ? "-" : joined);
    }
    grid.push_back(std::move(row));
  }
  std::vector<std::size_t> width(columns, 0);
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < columns; ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t c = 0; c < columns; ++c) {
      out << grid[i][c];
      if (c + 1 < columns) {
        out << std::string(width[c] - grid[i][c].size() + 2, ' ');
      }
    }
    out << '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) {
        total += w;
      }
      out << std::string(total + 2 * (columns - 1), '-') << '\n';
    }
  }
  return out.str();
}

}  // namespace semantify
