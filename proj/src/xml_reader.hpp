#pragma once

// Minimal XML reader for the restricted BPMN subset. Handles the prolog,
// comments, attributes, nested and self-closing elements, character data with
// the five named entities, and tracks line/column positions. Anything outside
// that (DOCTYPE, CDATA, processing instructions in the body, numeric
// character references) is rejected.

#include <map>
#include <string>
#include <vector>

namespace sadp::xml {

struct TextSegment {
    std::string text;
    int line = 0;  // 1-based line of the segment's first character
};

struct Element {
    std::string name;  // as written, prefix included
    std::map<std::string, std::string> attributes;
    std::vector<Element> children;
    std::vector<TextSegment> text_segments;
    int line = 0;
    int column = 0;

    // Name with any namespace prefix stripped: "bpmn:task" -> "task".
    std::string local_name() const;
    std::string text() const;  // all segments joined
    const std::string* attribute(const std::string& name) const;
};

// Parses a complete document and returns its root element.
// Throws sadp::ParseFailure(SyntaxError) with line/column on malformed input.
Element parse_document(const std::string& input);

}  // namespace sadp::xml
