#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace sadp {

// Machine-readable failure class. The CLI maps these onto its exit codes.
enum class ErrorCode {
    // structural model errors (build_application)
    DuplicateId,
    DanglingEdge,
    CycleDetected,
    UnknownTableRef,
    EmptyModel,
    // parsing (JSON and BPMN)
    SyntaxError,
    SchemaError,
    SemanticError,
    UnsupportedElement,
    MalformedAnnotation,
    DanglingAssociation,
    // rule evaluation
    MissingVariable,
    KindMismatch,
    UnitMismatch,
    NonUniqueHit,
    // optimizer
    Infeasible,
    TooLargeForExact,
    // misc precondition violations
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Position of a parse failure: a line/column pair for syntactic errors, an
// element path (JSON pointer or XML element id) for structural ones.
struct ParseLocation {
    int line = 0;    // 1-based; 0 when unknown
    int column = 0;  // 1-based; 0 when unknown
    std::string path;

    std::string describe() const;
};

class SadpError : public std::runtime_error {
  public:
    SadpError(ErrorCode code, std::string message, std::string subject = {})
        : std::runtime_error(std::move(message)), code_(code), subject_(std::move(subject)) {}

    ErrorCode code() const { return code_; }
    const std::string& subject() const { return subject_; }

  private:
    ErrorCode code_;
    std::string subject_;
};

class ParseFailure : public SadpError {
  public:
    ParseFailure(ErrorCode code, std::string message, ParseLocation location)
        : SadpError(code, std::move(message)), location_(std::move(location)) {}

    const ParseLocation& location() const { return location_; }

  private:
    ParseLocation location_;
};

}  // namespace sadp
