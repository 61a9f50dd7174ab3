#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "semantify/corpus.hpp"

namespace semantify {

enum class CorpusFormat {
  // One JSON object per line: {"id", "description", "statements": [{"predicate", "object"}]}.
  jsonl,
  // descriptions TSV (id, description) + annotations TSV (id, predicate, object).
  two_file,
};

// Parses a JSONL corpus. `source_name` is used in error locators.
Corpus read_corpus_jsonl(std::istream& in, std::string_view source_name = "<stream>");
Corpus read_corpus_two_file(std::istream& descriptions, std::istream& annotations,
                            std::string_view descriptions_name = "<descriptions>",
                            std::string_view annotations_name = "<annotations>");

// For two_file, `path` names the descriptions file and `annotations` the other.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format = CorpusFormat::jsonl,
                   const std::filesystem::path& annotations = {});

void write_corpus_jsonl(std::ostream& out, const Corpus& corpus);

// JSON object with optional keys stop_statements ([{predicate, object}]),
// stop_predicates, stop_objects and ubiquity_threshold.
FilterPolicy read_filter_policy(std::istream& in, std::string_view source_name = "<stream>");
FilterPolicy load_filter_policy(const std::filesystem::path& path);

}  // namespace semantify
