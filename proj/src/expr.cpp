#include "posdelay/expr.hpp"

#include "posdelay/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace posdelay {

namespace {

// The function table. Adding an entry here is the only step needed to make a
// new function available to the parser and the evaluator.
struct FunctionDef {
    std::string_view name;
    std::size_t arity;
    double (*apply)(std::span<const double>);
};

double apply_sqrt(std::span<const double> args) {
    if (args[0] < 0.0) throw DomainError("sqrt of negative argument");
    return std::sqrt(args[0]);
}

constexpr FunctionDef kFunctions[] = {
    {"sqrt", 1, &apply_sqrt},
};

const FunctionDef* find_function(std::string_view name) {
    for (const auto& f : kFunctions)
        if (f.name == name) return &f;
    return nullptr;
}

ExprPtr make(auto node) {
    return std::make_shared<const ExprNode>(ExprNode{std::move(node)});
}

class Parser {
public:
    Parser(std::string_view src, const ParseOptions& options) : src_(src), options_(options) {}

    ExprPtr parse() {
        skip_ws();
        if (pos_ >= src_.size()) fail(ParseErrorKind::Syntax, pos_, "empty expression");
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ < src_.size()) fail(ParseErrorKind::Syntax, pos_, "unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(ParseErrorKind kind, std::size_t at, const std::string& msg) const {
        throw ParseError(kind, at, msg);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    ExprPtr parse_expr() {
        ExprPtr lhs = parse_term();
        for (char c = peek(); c == '+' || c == '-'; c = peek()) {
            ++pos_;
            lhs = make(expr::Binary{c, lhs, parse_term()});
        }
        return lhs;
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_factor();
        for (char c = peek(); c == '*' || c == '/'; c = peek()) {
            ++pos_;
            lhs = make(expr::Binary{c, lhs, parse_factor()});
        }
        return lhs;
    }

    ExprPtr parse_factor() {
        if (accept('-')) return make(expr::Negate{parse_factor()});
        ExprPtr base = parse_atom();
        if (accept('^')) {
            skip_ws();
            const std::size_t at = pos_;
            if (!starts_number()) fail(ParseErrorKind::Syntax, at, "expected numeric exponent");
            return make(expr::Power{base, parse_number()});
        }
        return base;
    }

    bool starts_number() const {
        if (pos_ >= src_.size()) return false;
        const char c = src_[pos_];
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
    }

    double parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        if (text == ".") fail(ParseErrorKind::Syntax, start, "malformed number");
        char* end = nullptr;
        const double value = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || !std::isfinite(value)) {
            fail(ParseErrorKind::Syntax, start, "malformed number");
        }
        return value;
    }

    std::string parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        return std::string(src_.substr(start, pos_ - start));
    }

    ExprPtr variable(const std::string& name, std::size_t at) {
        if (!options_.variable_names.empty()) {
            for (std::size_t k = 0; k < options_.variable_names.size(); ++k)
                if (options_.variable_names[k] == name) return make(expr::Variable{k + 1});
            fail(ParseErrorKind::UnknownIdentifier, at, "unknown identifier '" + name + "'");
        }
        if (name.size() >= 2 && name[0] == 'x') {
            std::size_t index = 0;
            const char* first = name.data() + 1;
            const char* last = name.data() + name.size();
            auto [ptr, ec] = std::from_chars(first, last, index);
            if (ec == std::errc() && ptr == last) {
                if (index < 1 || index > options_.dimension) {
                    fail(ParseErrorKind::VariableRange, at,
                         "variable '" + name + "' outside x1..x" + std::to_string(options_.dimension));
                }
                return make(expr::Variable{index});
            }
        }
        fail(ParseErrorKind::UnknownIdentifier, at, "unknown identifier '" + name + "'");
    }

    ExprPtr parse_atom() {
        skip_ws();
        const std::size_t at = pos_;
        if (pos_ >= src_.size()) fail(ParseErrorKind::Syntax, at, "unexpected end of input");
        const char c = src_[pos_];
        if (starts_number()) return make(expr::Number{parse_number()});
        if (c == '(') {
            ++pos_;
            ExprPtr inner = parse_expr();
            if (!accept(')')) fail(ParseErrorKind::Syntax, pos_, "expected ')'");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::string name = parse_identifier();
            if (peek() != '(') return variable(name, at);
            const FunctionDef* fn = find_function(name);
            if (fn == nullptr) fail(ParseErrorKind::UnknownIdentifier, at, "unknown function '" + name + "'");
            ++pos_;
            std::vector<ExprPtr> args{parse_expr()};
            while (accept(',')) args.push_back(parse_expr());
            if (!accept(')')) fail(ParseErrorKind::Syntax, pos_, "expected ')'");
            if (args.size() != fn->arity) {
                fail(ParseErrorKind::Arity, at,
                     "'" + name + "' takes " + std::to_string(fn->arity) + " argument(s), got " +
                         std::to_string(args.size()));
            }
            return make(expr::Call{name, std::move(args)});
        }
        fail(ParseErrorKind::Syntax, at, std::string("unexpected '") + c + "'");
    }

    std::string_view src_;
    const ParseOptions& options_;
    std::size_t pos_ = 0;
};

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

ExprPtr parse_expression(std::string_view source, const ParseOptions& options) {
    return Parser(source, options).parse();
}

double evaluate(const ExprNode& node, std::span<const double> variables) {
    return std::visit(
        overloaded{
            [](const expr::Number& n) { return n.value; },
            [&](const expr::Variable& v) {
                if (v.index < 1 || v.index > variables.size())
                    throw DimensionError("expression variable index out of range");
                return variables[v.index - 1];
            },
            [&](const expr::Negate& n) { return -evaluate(*n.operand, variables); },
            [&](const expr::Binary& b) {
                const double l = evaluate(*b.lhs, variables);
                const double r = evaluate(*b.rhs, variables);
                switch (b.op) {
                case '+': return l + r;
                case '-': return l - r;
                case '*': return l * r;
                default:
                    if (r == 0.0) throw DomainError("division by zero");
                    return l / r;
                }
            },
            [&](const expr::Power& p) {
                const double base = evaluate(*p.base, variables);
                const double value = std::pow(base, p.exponent);
                if (!std::isfinite(value)) throw DomainError("power outside its domain");
                return value;
            },
            [&](const expr::Call& c) {
                const FunctionDef* fn = find_function(c.name);
                if (fn == nullptr) throw DomainError("unknown function '" + c.name + "'");
                std::vector<double> args;
                args.reserve(c.args.size());
                for (const auto& a : c.args) args.push_back(evaluate(*a, variables));
                return fn->apply(args);
            },
        },
        node.node);
}

std::string to_string(const ExprNode& node) {
    return std::visit(
        overloaded{
            [](const expr::Number& n) { return format_number(n.value); },
            [](const expr::Variable& v) { return "x" + std::to_string(v.index); },
            [](const expr::Negate& n) { return "(-" + to_string(*n.operand) + ")"; },
            [](const expr::Binary& b) {
                return "(" + to_string(*b.lhs) + " " + b.op + " " + to_string(*b.rhs) + ")";
            },
            [](const expr::Power& p) {
                return "(" + to_string(*p.base) + ")^" + format_number(p.exponent);
            },
            [](const expr::Call& c) {
                std::string out = c.name + "(";
                for (std::size_t i = 0; i < c.args.size(); ++i) {
                    if (i) out += ", ";
                    out += to_string(*c.args[i]);
                }
                return out + ")";
            },
        },
        node.node);
}

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        overloaded{
            [&](const expr::Number& n) { return n.value == std::get<expr::Number>(b.node).value; },
            [&](const expr::Variable& v) { return v.index == std::get<expr::Variable>(b.node).index; },
            [&](const expr::Negate& n) {
                return structurally_equal(*n.operand, *std::get<expr::Negate>(b.node).operand);
            },
            [&](const expr::Binary& x) {
                const auto& y = std::get<expr::Binary>(b.node);
                return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) && structurally_equal(*x.rhs, *y.rhs);
            },
            [&](const expr::Power& x) {
                const auto& y = std::get<expr::Power>(b.node);
                return x.exponent == y.exponent && structurally_equal(*x.base, *y.base);
            },
            [&](const expr::Call& x) {
                const auto& y = std::get<expr::Call>(b.node);
                if (x.name != y.name || x.args.size() != y.args.size()) return false;
                for (std::size_t i = 0; i < x.args.size(); ++i)
                    if (!structurally_equal(*x.args[i], *y.args[i])) return false;
                return true;
            },
        },
        a.node);
}

FieldExpr::FieldExpr(std::vector<ExprPtr> components, std::size_t dimension)
    : components_(std::move(components)), dimension_(dimension) {
    if (dimension_ < 1) throw ValidationError("FieldExpr: dimension must be at least 1");
    if (components_.size() != dimension_) {
        throw DimensionError("FieldExpr: expected " + std::to_string(dimension_) + " components, got " +
                             std::to_string(components_.size()));
    }
}

std::vector<std::string> FieldExpr::to_strings() const {
    std::vector<std::string> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(to_string(*c));
    return out;
}

FieldExpr parse_field(const std::vector<std::string>& sources, std::size_t n) {
    if (n < 1) throw PreconditionError("parse_field: dimension must be at least 1");
    if (sources.size() != n) {
        throw DimensionError("parse_field: expected " + std::to_string(n) + " component expressions, got " +
                             std::to_string(sources.size()));
    }
    const ParseOptions options{n, {}};
    std::vector<ExprPtr> components;
    components.reserve(n);
    for (const auto& s : sources) components.push_back(parse_expression(s, options));
    return FieldExpr(std::move(components), n);
}

} // namespace posdelay
