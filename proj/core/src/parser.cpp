#include "bmdp/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace bmdp {

std::string_view to_string(ParseErrorKind kind) noexcept {
    switch (kind) {
        case ParseErrorKind::LexError: return "LexError";
        case ParseErrorKind::SyntaxError: return "SyntaxError";
        case ParseErrorKind::DuplicateName: return "DuplicateName";
        case ParseErrorKind::UnknownType: return "UnknownType";
        case ParseErrorKind::BadProbability: return "BadProbability";
        case ParseErrorKind::BadCost: return "BadCost";
    }
    return "Unknown";
}

std::string ParseError::to_string() const {
    std::ostringstream os;
    os << span.line << ':' << span.column << ": " << bmdp::to_string(kind) << ": " << message;
    return os.str();
}

namespace {

enum class Tok { Ident, Number, String, LBrace, RBrace, Colon, Semicolon, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    SourceSpan span;
};

std::string_view describe(Tok kind) {
    switch (kind) {
        case Tok::Ident: return "identifier";
        case Tok::Number: return "number";
        case Tok::String: return "string";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::Colon: return "':'";
        case Tok::Semicolon: return "';'";
        case Tok::End: return "end of input";
    }
    return "token";
}

struct Failure {
    ParseError error;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_blank();
        Token tok;
        tok.span = {line_, column_, 1};
        if (pos_ >= text_.size()) return tok;

        const char c = text_[pos_];
        const std::size_t start = pos_;
        if (is_ident_start(c)) {
            while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
            tok.kind = Tok::Ident;
            tok.text = std::string(text_.substr(start, pos_ - start));
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') {
            lex_number(tok);
        } else if (c == '"') {
            lex_string(tok);
        } else {
            switch (c) {
                case '{': tok.kind = Tok::LBrace; break;
                case '}': tok.kind = Tok::RBrace; break;
                case ':': tok.kind = Tok::Colon; break;
                case ';': tok.kind = Tok::Semicolon; break;
                default:
                    throw Failure{{tok.span, ParseErrorKind::LexError,
                                   std::string("unexpected character '") + c + "'"}};
            }
            tok.text = std::string(1, c);
            advance();
        }
        tok.span.length = std::max<std::size_t>(1, pos_ - start);
        return tok;
    }

private:
    static bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    // [+-]? (digits ('.' digits?)? | '.' digits) ([eE] [+-]? digits)?
    void lex_number(Token& tok) {
        const std::size_t start = pos_;
        auto digits = [this] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                advance();
                ++n;
            }
            return n;
        };
        if (text_[pos_] == '+' || text_[pos_] == '-') advance();
        std::size_t mantissa = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            advance();
            mantissa += digits();
        }
        bool ok = mantissa > 0;
        if (ok && pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            advance();
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
            ok = digits() > 0;
        }
        // A number glued to an identifier character is malformed, e.g. "1.0x".
        while (pos_ < text_.size() && (is_ident_char(text_[pos_]) || text_[pos_] == '.')) {
            advance();
            ok = false;
        }
        const std::string_view lexeme = text_.substr(start, pos_ - start);
        tok.span.length = std::max<std::size_t>(1, lexeme.size());
        double value = 0.0;
        if (ok) {
            // from_chars rejects a leading '+'.
            const std::string_view digits_part = lexeme.front() == '+' ? lexeme.substr(1) : lexeme;
            const auto [ptr, ec] = std::from_chars(digits_part.data(), digits_part.data() + digits_part.size(), value);
            ok = ec == std::errc() && ptr == digits_part.data() + digits_part.size();
        }
        if (!ok)
            throw Failure{{tok.span, ParseErrorKind::LexError, "malformed number '" + std::string(lexeme) + "'"}};
        tok.kind = Tok::Number;
        tok.text = std::string(lexeme);
        tok.number = value;
    }

    void lex_string(Token& tok) {
        advance();  // opening quote
        std::string value;
        while (true) {
            if (pos_ >= text_.size() || text_[pos_] == '\n')
                throw Failure{{tok.span, ParseErrorKind::LexError, "unterminated string"}};
            const char c = text_[pos_];
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\\'))
                    throw Failure{{tok.span, ParseErrorKind::LexError, "invalid escape in string"}};
            }
            value.push_back(text_[pos_]);
            advance();
        }
        tok.kind = Tok::String;
        tok.text = std::move(value);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

bool is_keyword(std::string_view s) {
    return s == "bmdp" || s == "type" || s == "action" || s == "cost" || s == "init";
}

struct NameRef {
    std::string name;
    SourceSpan span;
};

struct RawOutcome {
    double probability = 0.0;
    SourceSpan probability_span;
    std::vector<NameRef> offspring;
};

struct RawAction {
    NameRef name;
    double cost = 0.0;
    std::vector<RawOutcome> outcomes;
};

struct RawType {
    NameRef name;
    std::vector<RawAction> actions;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { current_ = lexer_.next(); }

    Bmdp parse() {
        std::string model_name;
        // The header line is optional.
        if (at_keyword("bmdp")) {
            take();
            if (current_.kind == Tok::String) model_name = take().text;
        }

        std::vector<RawType> types;
        if (!at_keyword("type")) fail_expected("'type'");
        while (at_keyword("type")) types.push_back(parse_type());

        expect_keyword("init");
        std::vector<NameRef> init;
        while (current_.kind == Tok::Ident) init.push_back(take_name());
        expect(Tok::Semicolon);
        if (current_.kind != Tok::End) fail_expected("end of input");

        return resolve(std::move(model_name), types, init);
    }

private:
    Token take() {
        Token tok = std::move(current_);
        current_ = lexer_.next();
        return tok;
    }

    [[noreturn]] void fail_expected(std::string_view what) const {
        std::string found = current_.kind == Tok::End ? "end of input" : "'" + current_.text + "'";
        throw Failure{{current_.span, ParseErrorKind::SyntaxError,
                       "expected " + std::string(what) + ", found " + found}};
    }

    bool at_keyword(std::string_view kw) const { return current_.kind == Tok::Ident && current_.text == kw; }

    void expect_keyword(std::string_view kw) {
        if (!at_keyword(kw)) fail_expected("'" + std::string(kw) + "'");
        take();
    }

    Token expect(Tok kind) {
        if (current_.kind != kind) fail_expected(describe(kind));
        return take();
    }

    NameRef take_name() {
        if (current_.kind != Tok::Ident) fail_expected("identifier");
        if (is_keyword(current_.text))
            throw Failure{{current_.span, ParseErrorKind::SyntaxError,
                           "keyword '" + current_.text + "' cannot be used as a name"}};
        Token tok = take();
        return {std::move(tok.text), tok.span};
    }

    RawType parse_type() {
        expect_keyword("type");
        RawType type{take_name(), {}};
        expect(Tok::LBrace);
        if (!at_keyword("action")) fail_expected("'action'");
        std::map<std::string, bool, std::less<>> seen;
        while (at_keyword("action")) {
            RawAction action = parse_action();
            if (!seen.emplace(action.name.name, true).second)
                throw Failure{{action.name.span, ParseErrorKind::DuplicateName,
                               "duplicate action '" + action.name.name + "' in type '" + type.name.name + "'"}};
            type.actions.push_back(std::move(action));
        }
        expect(Tok::RBrace);
        return type;
    }

    RawAction parse_action() {
        expect_keyword("action");
        RawAction action{take_name(), 0.0, {}};
        expect_keyword("cost");
        const Token cost = expect(Tok::Number);
        if (!(cost.number > 0.0) || !std::isfinite(cost.number))
            throw Failure{{cost.span, ParseErrorKind::BadCost,
                           "cost must be strictly positive, found " + cost.text}};
        action.cost = cost.number;
        expect(Tok::LBrace);
        if (current_.kind != Tok::Number) fail_expected("outcome probability");
        double sum = 0.0;
        while (current_.kind == Tok::Number) {
            const Token p = take();
            if (!(p.number > 0.0 && p.number <= 1.0))
                throw Failure{{p.span, ParseErrorKind::BadProbability,
                               "probability must lie in (0, 1], found " + p.text}};
            sum += p.number;
            RawOutcome outcome{p.number, p.span, {}};
            expect(Tok::Colon);
            while (current_.kind == Tok::Ident) outcome.offspring.push_back(take_name());
            expect(Tok::Semicolon);
            action.outcomes.push_back(std::move(outcome));
        }
        expect(Tok::RBrace);
        if (std::abs(sum - 1.0) > kProbabilityTolerance) {
            std::ostringstream os;
            os.precision(12);
            os << "probabilities of action '" << action.name.name << "' sum to " << sum;
            throw Failure{{action.name.span, ParseErrorKind::BadProbability, os.str()}};
        }
        return action;
    }

    static Bmdp resolve(std::string model_name, const std::vector<RawType>& raw, const std::vector<NameRef>& init) {
        std::map<std::string, std::size_t, std::less<>> index;
        for (std::size_t i = 0; i < raw.size(); ++i)
            if (!index.emplace(raw[i].name.name, i).second)
                throw Failure{{raw[i].name.span, ParseErrorKind::DuplicateName,
                               "duplicate type '" + raw[i].name.name + "'"}};

        auto lookup = [&index](const NameRef& ref) {
            auto it = index.find(ref.name);
            if (it == index.end())
                throw Failure{{ref.span, ParseErrorKind::UnknownType, "unknown type '" + ref.name + "'"}};
            return TypeId{it->second};
        };
        auto to_config = [&lookup](const std::vector<NameRef>& refs) {
            std::vector<TypeId> ids;
            ids.reserve(refs.size());
            for (const auto& r : refs) ids.push_back(lookup(r));
            return Config(std::move(ids));
        };

        Bmdp model;
        model.name = std::move(model_name);
        for (const RawType& rt : raw) {
            TypeSpec type{rt.name.name, {}};
            for (const RawAction& ra : rt.actions) {
                ActionSpec action{ra.name.name, ra.cost, {}};
                for (const RawOutcome& ro : ra.outcomes) {
                    OffspringOutcome outcome{ro.probability, to_config(ro.offspring)};
                    for (const auto& prev : action.outcomes)
                        if (prev.offspring == outcome.offspring)
                            throw Failure{{ro.probability_span, ParseErrorKind::SyntaxError,
                                           "duplicate offspring list in action '" + ra.name.name + "'"}};
                    action.outcomes.push_back(std::move(outcome));
                }
                type.actions.push_back(std::move(action));
            }
            model.types.push_back(std::move(type));
        }
        model.init = to_config(init);
        normalize_probabilities(model);
        return model;
    }

    Lexer lexer_;
    Token current_;
};

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

ParseResult parse_model(std::string_view text) {
    try {
        Bmdp model = Parser(text).parse();
        if (auto violations = validate(model); !violations.empty())
            return ParseError{{1, 1, 1}, ParseErrorKind::SyntaxError, describe(violations.front(), model)};
        return model;
    } catch (const Failure& f) {
        return f.error;
    }
}

ParseResult parse_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return ParseError{{1, 1, 1}, ParseErrorKind::LexError, "cannot open '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string serialize_model(const Bmdp& model) {
    std::ostringstream os;
    os << "bmdp";
    if (!model.name.empty()) os << ' ' << quote(model.name);
    os << '\n';
    for (const TypeSpec& type : model.types) {
        os << "type " << type.name << " {\n";
        for (const ActionSpec& action : type.actions) {
            os << "  action " << action.name << " cost " << format_number(action.cost) << " {\n";
            for (const OffspringOutcome& outcome : action.outcomes) {
                os << "    " << format_number(outcome.probability) << ':';
                if (outcome.offspring.empty()) os << ' ';
                for (TypeId child : outcome.offspring) os << ' ' << model.types.at(child.index).name;
                os << ";\n";
            }
            os << "  }\n";
        }
        os << "}\n";
    }
    os << "init";
    for (TypeId t : model.init) os << ' ' << model.types.at(t.index).name;
    os << ";\n";
    return os.str();
}

}  // namespace bmdp
