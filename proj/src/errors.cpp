#include "sadp/errors.hpp"

namespace sadp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::DanglingEdge: return "DanglingEdge";
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::UnknownTableRef: return "UnknownTableRef";
        case ErrorCode::EmptyModel: return "EmptyModel";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::SemanticError: return "SemanticError";
        case ErrorCode::UnsupportedElement: return "UnsupportedElement";
        case ErrorCode::MalformedAnnotation: return "MalformedAnnotation";
        case ErrorCode::DanglingAssociation: return "DanglingAssociation";
        case ErrorCode::MissingVariable: return "MissingVariable";
        case ErrorCode::KindMismatch: return "KindMismatch";
        case ErrorCode::UnitMismatch: return "UnitMismatch";
        case ErrorCode::NonUniqueHit: return "NonUniqueHit";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::TooLargeForExact: return "TooLargeForExact";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

std::string ParseLocation::describe() const {
    if (line > 0) {
        return "line " + std::to_string(line) + ", column " + std::to_string(column);
    }
    if (!path.empty()) {
        return path;
    }
    return "unknown location";
}

}  // namespace sadp
