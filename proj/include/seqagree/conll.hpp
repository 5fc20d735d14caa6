#pragma once

// CoNLL column format: one token per line, whitespace-separated columns with
// the BIO tag last, blank lines between sentences, "-DOCSTART-" lines between
// documents. IOB1 and IOB2 inputs are both normalized to IOB2 before spans are
// read off.

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "types.hpp"

namespace seqagree {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Sentence {
  std::vector<std::string> tokens;
  std::map<std::string, PlacedAnnotation> typed_spans;
  std::size_t first_line = 0;  // 1-based line of the first token

  SequenceSpec sequence() const { return SequenceSpec(tokens.size()); }
  const PlacedAnnotation& spans_of(const std::string& type) const {
    static const PlacedAnnotation none;
    auto it = typed_spans.find(type);
    return it == typed_spans.end() ? none : it->second;
  }
};

struct CorpusDocument {
  std::string id;
  std::vector<Sentence> sentences;
};

enum class TagScheme { automatic, iob1, iob2 };

struct ParseOptions {
  TagScheme scheme = TagScheme::automatic;
  /// Reject dangling I- tags in IOB2 input instead of repairing them to B-.
  bool strict = false;
};

struct ParseResult {
  std::vector<CorpusDocument> documents;
  std::vector<std::string> warnings;
  TagScheme scheme = TagScheme::iob2;  // the scheme actually applied

  std::size_t sentence_count() const {
    std::size_t total = 0;
    for (const auto& d : documents) total += d.sentences.size();
    return total;
  }
};

namespace detail {

struct RawTag {
  char prefix = 'O';  // 'O', 'B' or 'I'
  std::string type;
};

struct RawSentence {
  std::vector<std::string> tokens;
  std::vector<RawTag> tags;
  std::vector<std::size_t> lines;
};

inline RawTag parse_tag(const std::string& tag, std::size_t line) {
  if (tag == "O") return {};
  if (tag.size() >= 3 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-')
    return {tag[0], tag.substr(2)};
  throw ParseError(line, "unknown tag '" + tag + "'");
}

// An I- tag that does not continue a span of the same type.
inline bool dangling(const RawTag& prev, const RawTag& cur) {
  return cur.prefix == 'I' && (prev.prefix == 'O' || prev.type != cur.type);
}

// A B- tag where IOB1 would have written I-.
inline bool opens_fresh_span(const RawTag& prev, const RawTag& cur) {
  return cur.prefix == 'B' && (prev.prefix == 'O' || prev.type != cur.type);
}

}  // namespace detail

inline const char* to_string(TagScheme s) {
  switch (s) {
    case TagScheme::automatic: return "auto";
    case TagScheme::iob1: return "iob1";
    case TagScheme::iob2: return "iob2";
  }
  return "?";
}

/// Decode IOB2-normalized tags into per-type spans.
inline std::map<std::string, PlacedAnnotation> spans_from_tags(const std::vector<std::string>& tags) {
  std::map<std::string, std::vector<Span>> open;
  detail::RawTag prev;
  for (std::size_t t = 0; t < tags.size(); ++t) {
    const auto cur = detail::parse_tag(tags[t], 0);
    if (cur.prefix == 'B' || detail::dangling(prev, cur))
      open[cur.type].push_back(Span{t + 1, 1});
    else if (cur.prefix == 'I')
      ++open[cur.type].back().length;
    prev = cur;
  }
  std::map<std::string, PlacedAnnotation> out;
  for (auto& [type, spans] : open) out.emplace(type, PlacedAnnotation(std::move(spans)));
  return out;
}

/// IOB2 tags for a sentence's spans.
inline std::vector<std::string> to_bio_tags(const Sentence& sentence) {
  std::vector<std::string> tags(sentence.tokens.size(), "O");
  for (const auto& [type, ann] : sentence.typed_spans)
    for (const auto& span : ann.spans()) {
      tags.at(span.start - 1) = "B-" + type;
      for (std::size_t t = span.start + 1; t < span.end(); ++t) tags.at(t - 1) = "I-" + type;
    }
  return tags;
}

inline ParseResult parse_conll(std::istream& in, const ParseOptions& options = {}) {
  struct RawDocument {
    std::vector<detail::RawSentence> sentences;
  };
  std::vector<RawDocument> raw;
  std::optional<std::size_t> columns;
  detail::RawSentence current;
  bool saw_anything = false;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (current.tokens.empty()) return;
    if (raw.empty()) raw.emplace_back();
    raw.back().sentences.push_back(std::move(current));
    current = {};
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::vector<std::string> cols;
    for (std::string f; fields >> f;) cols.push_back(std::move(f));
    if (cols.empty()) {
      flush();
      continue;
    }
    saw_anything = true;
    if (cols.front() == "-DOCSTART-") {
      flush();
      raw.emplace_back();
      continue;
    }
    if (cols.size() < 2) throw ParseError(line_no, "expected at least a token and a tag column");
    if (!columns) columns = cols.size();
    if (cols.size() != *columns)
      throw ParseError(line_no, "expected " + std::to_string(*columns) + " columns, found " +
                                    std::to_string(cols.size()));
    current.tokens.push_back(cols.front());
    current.tags.push_back(detail::parse_tag(cols.back(), line_no));
    current.lines.push_back(line_no);
  }
  flush();
  if (!saw_anything) throw ParseError(line_no, "empty input");

  ParseResult result;
  result.scheme = options.scheme;
  if (result.scheme == TagScheme::automatic) {
    bool iob1_evidence = false;
    bool iob2_evidence = false;
    for (const auto& doc : raw)
      for (const auto& s : doc.sentences) {
        detail::RawTag prev;
        for (const auto& tag : s.tags) {
          iob1_evidence |= detail::dangling(prev, tag);
          iob2_evidence |= detail::opens_fresh_span(prev, tag);
          prev = tag;
        }
      }
    result.scheme = iob1_evidence && !iob2_evidence ? TagScheme::iob1 : TagScheme::iob2;
  }

  std::size_t doc_index = 0;
  for (auto& doc : raw) {
    CorpusDocument out;
    out.id = "doc" + std::to_string(++doc_index);
    for (auto& s : doc.sentences) {
      Sentence sentence;
      sentence.tokens = std::move(s.tokens);
      sentence.first_line = s.lines.front();
      std::vector<std::string> normalized;
      normalized.reserve(s.tags.size());
      detail::RawTag prev;
      for (std::size_t t = 0; t < s.tags.size(); ++t) {
        auto tag = s.tags[t];
        if (detail::dangling(prev, tag)) {
          if (result.scheme == TagScheme::iob2) {
            const std::string msg = "line " + std::to_string(s.lines[t]) + ": dangling I-" + tag.type;
            if (options.strict) throw ParseError(s.lines[t], "dangling I-" + tag.type + " tag");
            result.warnings.push_back(msg + " repaired to B-" + tag.type);
          }
          tag.prefix = 'B';
        }
        normalized.push_back(tag.prefix == 'O' ? std::string("O") : std::string(1, tag.prefix) + "-" + tag.type);
        prev = tag;
      }
      sentence.typed_spans = spans_from_tags(normalized);
      out.sentences.push_back(std::move(sentence));
    }
    result.documents.push_back(std::move(out));
  }
  return result;
}

/// Two-column (token, IOB2 tag) output with a -DOCSTART- line per document.
inline void write_conll(std::ostream& out, const std::vector<CorpusDocument>& documents) {
  for (const auto& doc : documents) {
    out << "-DOCSTART- O\n\n";
    for (const auto& s : doc.sentences) {
      const auto tags = to_bio_tags(s);
      for (std::size_t t = 0; t < s.tokens.size(); ++t) out << s.tokens[t] << ' ' << tags[t] << '\n';
      out << '\n';
    }
  }
}

}  // namespace seqagree
