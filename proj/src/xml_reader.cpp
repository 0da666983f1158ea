#include "xml_reader.hpp"

#include <cctype>

#include "sadp/errors.hpp"

namespace sadp::xml {

std::string Element::local_name() const {
    const auto colon = name.find(':');
    return colon == std::string::npos ? name : name.substr(colon + 1);
}

std::string Element::text() const {
    std::string out;
    for (const auto& segment : text_segments) out += segment.text;
    return out;
}

const std::string* Element::attribute(const std::string& attr) const {
    auto it = attributes.find(attr);
    return it == attributes.end() ? nullptr : &it->second;
}

namespace {

class Reader {
  public:
    explicit Reader(const std::string& input) : input_(input) {}

    Element parse() {
        skip_prolog_and_misc();
        if (eof()) fail("document has no root element");
        Element root = parse_element();
        skip_misc();
        if (!eof()) fail("content after the root element");
        return root;
    }

  private:
    const std::string& input_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseFailure(ErrorCode::SyntaxError, "XML: " + message,
                           ParseLocation{line_, column_, ""});
    }

    bool eof() const { return pos_ >= input_.size(); }
    char peek() const { return input_[pos_]; }

    bool starts_with(std::string_view prefix) const {
        return input_.compare(pos_, prefix.size(), prefix) == 0;
    }

    char advance() {
        const char c = input_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void advance_by(std::size_t count) {
        for (std::size_t i = 0; i < count && !eof(); ++i) advance();
    }

    void skip_whitespace() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    void skip_comment() {
        advance_by(4);  // "<!--"
        while (!eof() && !starts_with("-->")) advance();
        if (eof()) fail("unterminated comment");
        advance_by(3);
    }

    void skip_misc() {
        while (true) {
            skip_whitespace();
            if (starts_with("<!--")) {
                skip_comment();
            } else {
                return;
            }
        }
    }

    void skip_prolog_and_misc() {
        skip_whitespace();
        if (starts_with("<?xml")) {
            while (!eof() && !starts_with("?>")) advance();
            if (eof()) fail("unterminated XML declaration");
            advance_by(2);
        }
        skip_misc();
        if (starts_with("<!DOCTYPE")) fail("DOCTYPE is not supported");
    }

    static bool is_name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
               c == ':';
    }

    std::string read_name() {
        std::string name;
        while (!eof() && is_name_char(peek())) name += advance();
        if (name.empty()) fail("expected a name");
        return name;
    }

    std::string decode_entity() {
        // at '&'
        const std::size_t semi = input_.find(';', pos_);
        if (semi == std::string::npos || semi - pos_ > 6) fail("unterminated entity reference");
        const std::string entity = input_.substr(pos_ + 1, semi - pos_ - 1);
        advance_by(semi - pos_ + 1);
        if (entity == "lt") return "<";
        if (entity == "gt") return ">";
        if (entity == "amp") return "&";
        if (entity == "quot") return "\"";
        if (entity == "apos") return "'";
        fail("unsupported entity '&" + entity + ";'");
    }

    std::string read_attribute_value() {
        const char quote = peek();
        if (quote != '"' && quote != '\'') fail("attribute value must be quoted");
        advance();
        std::string value;
        while (!eof() && peek() != quote) {
            if (peek() == '&') {
                value += decode_entity();
            } else if (peek() == '<') {
                fail("'<' inside attribute value");
            } else {
                value += advance();
            }
        }
        if (eof()) fail("unterminated attribute value");
        advance();
        return value;
    }

    Element parse_element() {
        const int elem_line = line_;
        const int elem_column = column_;
        advance();  // '<'
        Element element;
        element.line = elem_line;
        element.column = elem_column;
        element.name = read_name();

        while (true) {
            skip_whitespace();
            if (eof()) fail("unterminated start tag of <" + element.name + ">");
            if (peek() == '/') {
                advance();
                if (eof() || peek() != '>') fail("malformed self-closing tag");
                advance();
                return element;
            }
            if (peek() == '>') {
                advance();
                break;
            }
            const std::string attr_name = read_name();
            skip_whitespace();
            if (eof() || peek() != '=') fail("expected '=' after attribute '" + attr_name + "'");
            advance();
            skip_whitespace();
            if (!element.attributes.emplace(attr_name, read_attribute_value()).second) {
                fail("duplicate attribute '" + attr_name + "'");
            }
        }

        // content
        while (true) {
            if (eof()) fail("unterminated element <" + element.name + ">");
            if (starts_with("<!--")) {
                skip_comment();
                continue;
            }
            if (starts_with("</")) {
                advance_by(2);
                const std::string close = read_name();
                if (close != element.name) {
                    fail("mismatched closing tag </" + close + "> for <" + element.name + ">");
                }
                skip_whitespace();
                if (eof() || peek() != '>') fail("malformed closing tag");
                advance();
                return element;
            }
            if (starts_with("<![CDATA[")) fail("CDATA sections are not supported");
            if (peek() == '<') {
                element.children.push_back(parse_element());
                continue;
            }
            TextSegment segment;
            segment.line = line_;
            while (!eof() && peek() != '<') {
                if (peek() == '&') {
                    segment.text += decode_entity();
                } else {
                    segment.text += advance();
                }
            }
            element.text_segments.push_back(std::move(segment));
        }
    }
};

}  // namespace

Element parse_document(const std::string& input) { return Reader(input).parse(); }

}  // namespace sadp::xml
