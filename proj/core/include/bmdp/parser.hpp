#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

#include "bmdp/model.hpp"

namespace bmdp {

/// 1-based position of a token in the source text.
struct SourceSpan {
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t length = 1;
};

enum class ParseErrorKind { LexError, SyntaxError, DuplicateName, UnknownType, BadProbability, BadCost };

[[nodiscard]] std::string_view to_string(ParseErrorKind kind) noexcept;

struct ParseError {
    SourceSpan span;
    ParseErrorKind kind = ParseErrorKind::SyntaxError;
    std::string message;

    /// "line:column: kind: message"
    [[nodiscard]] std::string to_string() const;
};

using ParseResult = std::variant<Bmdp, ParseError>;

/// Parses the textual model format:
///
///     model      := ("bmdp" string?)? typedecl+ initdecl
///     typedecl   := "type" ident "{" actiondecl+ "}"
///     actiondecl := "action" ident "cost" float "{" outcome+ "}"
///     outcome    := float ":" ident* ";"
///     initdecl   := "init" ident* ";"
///
/// `#` starts a comment running to the end of the line. Types may be
/// referenced before they are declared. Reports the first error found.
/// Probabilities within 1e-9 of summing to one are renormalized.
[[nodiscard]] ParseResult parse_model(std::string_view text);

/// Reads and parses a model file. File-system failures are reported as a
/// LexError at 1:1.
[[nodiscard]] ParseResult parse_model_file(const std::string& path);

/// Canonical text form: one outcome per line, numbers with 17 significant
/// digits, types and actions in index order. Round-trips through parse_model.
[[nodiscard]] std::string serialize_model(const Bmdp& model);

}  // namespace bmdp
