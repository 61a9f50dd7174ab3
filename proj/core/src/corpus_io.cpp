#include "semantify/corpus_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include <json.hpp>

#include "semantify/error.hpp"
#include "semantify/text.hpp"

namespace semantify {
namespace {

using nlohmann::json;

std::string locator(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

std::string id_field(const json& value, const std::string& where) {
  if (value.is_string()) {
    return value.get<std::string>();
  }
  if (value.is_number_integer()) {
    return std::to_string(value.get<long long>());
  }
  throw ParseError("\"id\" must be a string or integer", where);
}

const json& require(const json& record, const char* key, const std::string& where) {
  const auto it = record.find(key);
  if (it == record.end()) {
    throw ParseError(std::string("missing field \"") + key + "\"", where);
  }
  return *it;
}

std::string string_field(const json& record, const char* key, const std::string& where) {
  const auto& v = require(record, key, where);
  if (!v.is_string()) {
    throw ParseError(std::string("field \"") + key + "\" must be a string", where);
  }
  return v.get<std::string>();
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  return line;
}

bool skippable(const std::string& line) {
  return text::normalize_whitespace(line).empty() || line.front() == '#';
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return in;
}

}  // namespace

Corpus read_corpus_jsonl(std::istream& in, std::string_view source_name) {
  CorpusBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  std::size_t records = 0;
  std::vector<SemanticStatement> statements;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (text::normalize_whitespace(line).empty()) {
      continue;
    }
    const auto where = locator(source_name, line_no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON record: ") + e.what(), where);
    }
    if (!record.is_object()) {
      throw ParseError("record is not a JSON object", where);
    }
    Bioassay assay{id_field(require(record, "id", where), where),
                   string_field(record, "description", where)};
    const auto& list = require(record, "statements", where);
    if (!list.is_array()) {
      throw ParseError("\"statements\" must be an array", where);
    }
    statements.clear();
    for (const auto& s : list) {
      if (!s.is_object()) {
        throw ParseError("statement entries must be objects", where);
      }
      // Canonicalized (and validated) by the builder.
      statements.push_back(
          {string_field(s, "predicate", where), string_field(s, "object", where)});
    }
    builder.add(std::move(assay), statements, where);
    ++records;
  }
  if (records == 0) {
    throw ParseError("corpus contains no records", std::string(source_name));
  }
  return std::move(builder).build();
}

Corpus read_corpus_two_file(std::istream& descriptions, std::istream& annotations,
                            std::string_view descriptions_name,
                            std::string_view annotations_name) {
  std::vector<Bioassay> assays;
  std::map<std::string, std::size_t> position;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(descriptions, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (skippable(line)) {
      continue;
    }
    const auto where = locator(descriptions_name, line_no);
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) {
      throw ParseError("expected 2 tab-separated fields (id, description), got " +
                           std::to_string(fields.size()),
                       where);
    }
    Bioassay a{text::unescape_field(fields[0]), text::unescape_field(fields[1])};
    if (!position.emplace(a.id, assays.size()).second) {
      throw ValidationError(where + ": duplicate assay id " + a.id);
    }
    assays.push_back(std::move(a));
  }
  if (assays.empty()) {
    throw ParseError("descriptions file contains no records", std::string(descriptions_name));
  }

  std::vector<std::vector<SemanticStatement>> statements(assays.size());
  line_no = 0;
  while (std::getline(annotations, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (skippable(line)) {
      continue;
    }
    const auto where = locator(annotations_name, line_no);
    const auto fields = text::split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError("expected 3 tab-separated fields (id, predicate, object), got " +
                           std::to_string(fields.size()),
                       where);
    }
    const auto id = text::unescape_field(fields[0]);
    const auto it = position.find(id);
    if (it == position.end()) {
      throw ParseError("annotation for unknown assay " + id, where);
    }
    statements[it->second].push_back(
        {text::unescape_field(fields[1]), text::unescape_field(fields[2])});
  }

  CorpusBuilder builder;
  for (std::size_t i = 0; i < assays.size(); ++i) {
    builder.add(std::move(assays[i]), statements[i], descriptions_name);
  }
  return std::move(builder).build();
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const std::filesystem::path& annotations) {
  auto in = open_input(path);
  if (format == CorpusFormat::jsonl) {
    return read_corpus_jsonl(in, path.string());
  }
  if (annotations.empty()) {
    throw UsageError("two-file corpus format needs an annotations file");
  }
  auto ann = open_input(annotations);
  return read_corpus_two_file(in, ann, path.string(), annotations.string());
}

void write_corpus_jsonl(std::ostream& out, const Corpus& corpus) {
  for (const auto& a : corpus.assays()) {
    json statements = json::array();
    for (auto id : a.statements) {
      const auto& s = corpus.statement(id);
      statements.push_back({{"predicate", s.predicate}, {"object", s.object}});
    }
    const json record = {
        {"id", a.assay.id}, {"description", a.assay.description}, {"statements", statements}};
    out << record.dump() << '\n';
  }
}

FilterPolicy read_filter_policy(std::istream& in, std::string_view source_name) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed filter policy: ") + e.what(),
                     std::string(source_name));
  }
  if (!doc.is_object()) {
    throw ParseError("filter policy must be a JSON object", std::string(source_name));
  }
  FilterPolicy policy;
  const std::string where(source_name);
  try {
    if (auto it = doc.find("stop_statements"); it != doc.end()) {
      for (const auto& s : *it) {
        policy.stop_statements.push_back(make_statement(string_field(s, "predicate", where),
                                                        string_field(s, "object", where)));
      }
    }
    if (auto it = doc.find("stop_predicates"); it != doc.end()) {
      for (const auto& p : *it) {
        policy.stop_predicates.push_back(text::normalize_whitespace(p.get<std::string>()));
      }
    }
    if (auto it = doc.find("stop_objects"); it != doc.end()) {
      for (const auto& o : *it) {
        policy.stop_objects.push_back(text::normalize_whitespace(o.get<std::string>()));
      }
    }
    if (auto it = doc.find("ubiquity_threshold"); it != doc.end() && !it->is_null()) {
      const double t = it->get<double>();
      if (t < 0.0 || t > 1.0) {
        throw ParseError("ubiquity_threshold must lie in [0, 1]", where);
      }
      policy.ubiquity_threshold = t;
    }
  } catch (const json::type_error& e) {
    throw ParseError(std::string("filter policy has a field of the wrong type: ") + e.what(),
                     where);
  }
  return policy;
}

FilterPolicy load_filter_policy(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_filter_policy(in, path.string());
}

}  // namespace semantify
