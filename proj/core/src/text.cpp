#include "semantify/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "semantify/error.hpp"

namespace semantify::text {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

constexpr std::array<std::string_view, 24> kStopwords = {
    "a",    "an",   "and", "are", "as",   "at",   "be",  "by",
    "for",  "from", "in",  "is",  "it",   "of",   "on",  "or",
    "that", "the",  "this", "to", "was",  "were", "with", "which"};

bool is_stopword(std::string_view token) {
  return std::find(kStopwords.begin(), kStopwords.end(), token) != kStopwords.end();
}

}  // namespace

std::string normalize_whitespace(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  bool pending_space = false;
  for (char c : in) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view in) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !is_stopword(current)) {
      tokens.push_back(current);
    }
    current.clear();
  };
  for (char c : in) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) != 0) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::string escape_field(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (char c : in) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_field(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] != '\\') {
      out.push_back(in[i]);
      continue;
    }
    if (i + 1 == in.size()) {
      throw ParseError("dangling escape at end of field");
    }
    switch (in[++i]) {
      case '\\': out.push_back('\\'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      default: throw ParseError(std::string("unknown escape \\") + in[i]);
    }
  }
  return out;
}

std::vector<std::string_view> split(std::string_view in, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = in.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(in.substr(start));
      return parts;
    }
    parts.push_back(in.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace semantify::text
