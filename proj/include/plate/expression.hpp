#pragma once

// Tiny arithmetic expression language for configuration inputs:
// numeric literals, the variables x, y, t, the constant pi, + - * / ^,
// parentheses, and sin, cos, exp.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace plate {

class ExpressionError : public std::runtime_error {
public:
    ExpressionError(const std::string& msg, std::size_t column)
        : std::runtime_error(msg + " (column " + std::to_string(column + 1) + ")"), column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

class Expression {
public:
    enum Var : unsigned { X = 1u, Y = 2u, T = 4u };

    /// Parses `text`; variables outside `allowed` (a mask of Var) are errors.
    static Expression parse(std::string_view text, unsigned allowed = X | Y | T);
    static Expression constant(double value);

    double operator()(double x = 0.0, double y = 0.0, double t = 0.0) const;

    const std::string& text() const noexcept { return text_; }
    bool uses(Var v) const noexcept { return (used_ & v) != 0; }
    bool is_constant() const noexcept { return used_ == 0; }
    /// True for the literal expression "0" (or anything folding to 0 with no variables).
    bool is_zero() const;

    struct Node;

private:
    std::string text_;
    unsigned used_ = 0;
    std::shared_ptr<const Node> root_;
};

}  // namespace plate
