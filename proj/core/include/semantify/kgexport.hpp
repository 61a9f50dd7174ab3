#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semantify/corpus.hpp"

namespace semantify {

enum class Provenance { gold, predicted, curated };

std::string to_string(Provenance p);
Provenance parse_provenance(std::string_view name);

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;
  Provenance provenance = Provenance::gold;

  bool operator==(const Triple&) const = default;
};

// Triples of one assay, subject "bioassay:<id>", sorted by predicate then
// object, without duplicates.
class TripleSet {
 public:
  TripleSet() = default;
  explicit TripleSet(std::string assay_id) : assay_id_(std::move(assay_id)) {}

  const std::string& assay_id() const noexcept { return assay_id_; }
  std::string subject() const { return subject_for(assay_id_); }
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }

  // Inserts in sorted position; returns false for a duplicate (predicate, object).
  bool insert(const SemanticStatement& statement, Provenance provenance);

  bool operator==(const TripleSet&) const = default;

  static std::string subject_for(std::string_view assay_id);

 private:
  std::string assay_id_;
  std::vector<Triple> triples_;
};

TripleSet export_triples(std::string_view assay_id, std::span<const SemanticStatement> statements,
                         Provenance provenance);

// One line per triple: subject, predicate, object, provenance, tab-separated,
// fields escaped with text::escape_field.
void write_triples(std::ostream& out, const TripleSet& set);
// Throws ParseError on a malformed line or a subject that changes mid-file.
// An empty stream yields an empty set with an empty assay id.
TripleSet read_triples(std::istream& in, std::string_view source_name = "<stream>");
void write_triples_file(const TripleSet& set, const std::filesystem::path& path);

struct ComparisonTable {
  std::vector<std::string> assays;      // column headers, input order
  std::vector<std::string> predicates;  // row headers, sorted
  // cells[row][column]: objects sorted ascending; empty when absent.
  std::vector<std::vector<std::vector<std::string>>> cells;

  const std::vector<std::string>& cell(std::string_view predicate, std::string_view assay) const;
};

// Throws UsageError with fewer than two sets.
ComparisonTable compare_assays(std::span<const TripleSet> sets);

std::string comparison_json(const ComparisonTable& table);
// Aligned plain-text table; multi-valued cells joined with "; ".
std::string render_comparison_text(const ComparisonTable& table);

}  // namespace semantify
