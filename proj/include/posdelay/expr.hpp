#pragma once

// Arithmetic expressions over x1..xn with +, -, *, /, ^number, unary minus,
// parentheses and a small function table (sqrt).
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' number)? | '-' factor
//   atom   := number | 'x'index | name '(' expr (',' expr)* ')' | '(' expr ')'

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace posdelay {

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

namespace expr {

struct Number {
    double value;
};

/// 1-based variable index.
struct Variable {
    std::size_t index;
};

struct Negate {
    ExprPtr operand;
};

struct Binary {
    char op; // one of + - * /
    ExprPtr lhs;
    ExprPtr rhs;
};

struct Power {
    ExprPtr base;
    double exponent;
};

struct Call {
    std::string name;
    std::vector<ExprPtr> args;
};

} // namespace expr

struct ExprNode {
    std::variant<expr::Number, expr::Variable, expr::Negate, expr::Binary, expr::Power, expr::Call> node;
};

struct ParseOptions {
    /// Number of admissible variables; indices must lie in [1, dimension].
    std::size_t dimension = 1;
    /// When non-empty, variables are spelled by these names (name k -> index k+1)
    /// instead of x1..xn.
    std::vector<std::string> variable_names;
};

/// Throws ParseError with the byte offset of the offending token.
ExprPtr parse_expression(std::string_view source, const ParseOptions& options);

/// Throws DomainError on a negative sqrt argument, division by zero or non-finite power.
double evaluate(const ExprNode& node, std::span<const double> variables);

/// Fully parenthesized text that parses back to a structurally identical tree.
std::string to_string(const ExprNode& node);

bool structurally_equal(const ExprNode& a, const ExprNode& b);

/// One expression per component of an n-dimensional vector field.
class FieldExpr {
public:
    FieldExpr(std::vector<ExprPtr> components, std::size_t dimension);

    std::size_t dimension() const noexcept { return dimension_; }
    const std::vector<ExprPtr>& components() const noexcept { return components_; }

    std::vector<std::string> to_strings() const;

private:
    std::vector<ExprPtr> components_;
    std::size_t dimension_;
};

/// Parses n component expressions in the variables x1..xn.
FieldExpr parse_field(const std::vector<std::string>& sources, std::size_t n);

} // namespace posdelay
