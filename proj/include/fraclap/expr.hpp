#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fraclap {

/// Syntax or name error in an expression, with the byte offset of the problem.
class ExprError : public std::runtime_error {
public:
    ExprError(const std::string& what, std::size_t offset);
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// AST of the coefficient mini-language in the single variable x.
struct Expr {
    enum class Kind { Number, Variable, Pi, Negate, Add, Sub, Mul, Div, Pow, Call };
    Kind kind = Kind::Number;
    double value = 0.0;         // Number
    std::string function;       // Call: sin, cos, sinh, cosh, tanh, exp
    std::vector<ExprPtr> args;  // operands (1 for Negate and Call, 2 for binary operators)
};

/// Recursive descent with precedence ^ > unary minus > * / > + -; binary operators
/// are left associative except ^, which is right associative.
[[nodiscard]] ExprPtr parse_expr(std::string_view src);

/// Fully parenthesized text that parses back to the same tree; numbers use 17 significant digits.
[[nodiscard]] std::string to_string(const Expr& e);

[[nodiscard]] double evaluate(const Expr& e, double x);

/// Structural equality (numbers compared exactly).
[[nodiscard]] bool equal(const Expr& a, const Expr& b);

/// Names accepted in Call nodes.
[[nodiscard]] const std::vector<std::string>& expr_functions();

}  // namespace fraclap
