#include "plate/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace plate {

struct Expression::Node {
    enum class Kind { Number, VarX, VarY, VarT, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp };
    Kind kind;
    double value = 0.0;
    std::shared_ptr<const Node> a, b;

    double eval(double x, double y, double t) const {
        switch (kind) {
            case Kind::Number: return value;
            case Kind::VarX: return x;
            case Kind::VarY: return y;
            case Kind::VarT: return t;
            case Kind::Neg: return -a->eval(x, y, t);
            case Kind::Add: return a->eval(x, y, t) + b->eval(x, y, t);
            case Kind::Sub: return a->eval(x, y, t) - b->eval(x, y, t);
            case Kind::Mul: return a->eval(x, y, t) * b->eval(x, y, t);
            case Kind::Div: return a->eval(x, y, t) / b->eval(x, y, t);
            case Kind::Pow: return std::pow(a->eval(x, y, t), b->eval(x, y, t));
            case Kind::Sin: return std::sin(a->eval(x, y, t));
            case Kind::Cos: return std::cos(a->eval(x, y, t));
            case Kind::Exp: return std::exp(a->eval(x, y, t));
        }
        return 0.0;
    }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    return std::make_shared<const Node>(Node{k, 0.0, std::move(a), std::move(b)});
}

NodePtr number(double v) { return std::make_shared<const Node>(Node{Node::Kind::Number, v, {}, {}}); }

// expr  := term (('+' | '-') term)*
// term  := unary (('*' | '/') unary)*
// unary := ('+' | '-') unary | power
// power := primary ('^' unary)?
class Parser {
public:
    Parser(std::string_view s, unsigned allowed) : s_(s), allowed_(allowed) {}

    NodePtr parse_all() {
        NodePtr n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

    unsigned used() const noexcept { return used_; }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ExpressionError(msg, pos_); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr n = term();
        for (;;) {
            if (accept('+'))
                n = make(Node::Kind::Add, n, term());
            else if (accept('-'))
                n = make(Node::Kind::Sub, n, term());
            else
                return n;
        }
    }

    NodePtr term() {
        NodePtr n = unary();
        for (;;) {
            if (accept('*'))
                n = make(Node::Kind::Mul, n, unary());
            else if (accept('/'))
                n = make(Node::Kind::Div, n, unary());
            else
                return n;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Kind::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Node::Kind::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (accept('(')) {
            NodePtr n = expr();
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return literal();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr literal() {
        double v = 0.0;
        const char* first = s_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
        if (ec != std::errc()) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - first);
        return number(v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        const std::string_view id = s_.substr(start, pos_ - start);
        auto var = [&](Expression::Var v, Node::Kind k) {
            if (!(allowed_ & v)) {
                pos_ = start;
                fail("variable '" + std::string(id) + "' is not allowed here");
            }
            used_ |= v;
            return make(k);
        };
        if (id == "x") return var(Expression::X, Node::Kind::VarX);
        if (id == "y") return var(Expression::Y, Node::Kind::VarY);
        if (id == "t") return var(Expression::T, Node::Kind::VarT);
        if (id == "pi") return number(std::numbers::pi);
        Node::Kind fn;
        if (id == "sin")
            fn = Node::Kind::Sin;
        else if (id == "cos")
            fn = Node::Kind::Cos;
        else if (id == "exp")
            fn = Node::Kind::Exp;
        else {
            pos_ = start;
            fail("unknown identifier '" + std::string(id) + "'");
        }
        if (!accept('(')) fail("expected '(' after " + std::string(id));
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(fn, arg);
    }

    std::string_view s_;
    unsigned allowed_;
    std::size_t pos_ = 0;
    unsigned used_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, unsigned allowed) {
    Parser p(text, allowed);
    Expression e;
    e.root_ = p.parse_all();
    e.used_ = p.used();
    e.text_ = std::string(text);
    // trim
    const auto b = e.text_.find_first_not_of(" \t");
    const auto last = e.text_.find_last_not_of(" \t");
    e.text_ = b == std::string::npos ? std::string() : e.text_.substr(b, last - b + 1);
    return e;
}

Expression Expression::constant(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return parse(std::string_view(buf, static_cast<std::size_t>(ptr - buf)), 0);
}

double Expression::operator()(double x, double y, double t) const {
    return root_ ? root_->eval(x, y, t) : 0.0;
}

bool Expression::is_zero() const { return is_constant() && (*this)() == 0.0; }

}  // namespace plate
