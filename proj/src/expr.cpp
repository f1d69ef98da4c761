#include "fraclap/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace fraclap {

ExprError::ExprError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

const std::vector<std::string>& expr_functions() {
    static const std::vector<std::string> names{"sin", "cos", "sinh", "cosh", "tanh", "exp"};
    return names;
}

namespace {

ExprPtr make(Expr::Kind k, std::vector<ExprPtr> args = {}, double value = 0.0, std::string fn = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->args = std::move(args);
    e->value = value;
    e->function = std::move(fn);
    return e;
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    ExprPtr parse() {
        skip();
        if (pos_ >= s_.size()) throw ExprError("empty expression", pos_);
        auto e = sum();
        skip();
        if (pos_ != s_.size()) throw ExprError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    void skip() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr sum() {
        auto lhs = product();
        for (;;) {
            if (accept('+'))
                lhs = make(Expr::Kind::Add, {lhs, product()});
            else if (accept('-'))
                lhs = make(Expr::Kind::Sub, {lhs, product()});
            else
                return lhs;
        }
    }

    ExprPtr product() {
        auto lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = make(Expr::Kind::Mul, {lhs, unary()});
            else if (accept('/'))
                lhs = make(Expr::Kind::Div, {lhs, unary()});
            else
                return lhs;
        }
    }

    ExprPtr unary() {
        if (accept('-')) return make(Expr::Kind::Negate, {unary()});
        return power();
    }

    ExprPtr power() {
        auto base = primary();
        if (accept('^')) return make(Expr::Kind::Pow, {base, unary()});
        return base;
    }

    ExprPtr primary() {
        skip();
        if (pos_ >= s_.size()) throw ExprError("unexpected end of expression", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = sum();
            if (!accept(')')) throw ExprError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return name();
        throw ExprError(std::string("unexpected '") + c + "'", pos_);
    }

    ExprPtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
            if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
                pos_ = p;
                digits();
            }
        }
        double v = 0.0;
        const auto r = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (r.ec != std::errc() || r.ptr != s_.data() + pos_) throw ExprError("malformed number", start);
        return make(Expr::Kind::Number, {}, v);
    }

    ExprPtr name() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        const std::string id(s_.substr(start, pos_ - start));
        if (id == "x") return make(Expr::Kind::Variable);
        if (id == "pi") return make(Expr::Kind::Pi);
        const auto& fns = expr_functions();
        if (std::find(fns.begin(), fns.end(), id) == fns.end()) throw ExprError("unknown identifier '" + id + "'", start);
        if (!accept('(')) throw ExprError("expected '(' after " + id, pos_);
        auto arg = sum();
        if (!accept(')')) throw ExprError("expected ')'", pos_);
        return make(Expr::Kind::Call, {arg}, 0.0, id);
    }
};

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExprPtr parse_expr(std::string_view src) { return Parser(src).parse(); }

std::string to_string(const Expr& e) {
    auto bin = [&](const char* op) { return "(" + to_string(*e.args[0]) + " " + op + " " + to_string(*e.args[1]) + ")"; };
    switch (e.kind) {
        case Expr::Kind::Number: return format_number(e.value);
        case Expr::Kind::Variable: return "x";
        case Expr::Kind::Pi: return "pi";
        case Expr::Kind::Negate: return "(-" + to_string(*e.args[0]) + ")";
        case Expr::Kind::Add: return bin("+");
        case Expr::Kind::Sub: return bin("-");
        case Expr::Kind::Mul: return bin("*");
        case Expr::Kind::Div: return bin("/");
        case Expr::Kind::Pow: return bin("^");
        case Expr::Kind::Call: return e.function + "(" + to_string(*e.args[0]) + ")";
    }
    throw std::logic_error("to_string: bad expression kind");
}

double evaluate(const Expr& e, double x) {
    auto arg = [&](std::size_t k) { return evaluate(*e.args[k], x); };
    switch (e.kind) {
        case Expr::Kind::Number: return e.value;
        case Expr::Kind::Variable: return x;
        case Expr::Kind::Pi: return std::numbers::pi;
        case Expr::Kind::Negate: return -arg(0);
        case Expr::Kind::Add: return arg(0) + arg(1);
        case Expr::Kind::Sub: return arg(0) - arg(1);
        case Expr::Kind::Mul: return arg(0) * arg(1);
        case Expr::Kind::Div: return arg(0) / arg(1);
        case Expr::Kind::Pow: return std::pow(arg(0), arg(1));
        case Expr::Kind::Call: {
            const double v = arg(0);
            if (e.function == "sin") return std::sin(v);
            if (e.function == "cos") return std::cos(v);
            if (e.function == "sinh") return std::sinh(v);
            if (e.function == "cosh") return std::cosh(v);
            if (e.function == "tanh") return std::tanh(v);
            if (e.function == "exp") return std::exp(v);
            throw std::invalid_argument("evaluate: unknown function " + e.function);
        }
    }
    throw std::logic_error("evaluate: bad expression kind");
}

bool equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    if (a.kind == Expr::Kind::Number && a.value != b.value) return false;
    if (a.kind == Expr::Kind::Call && a.function != b.function) return false;
    for (std::size_t k = 0; k < a.args.size(); ++k)
        if (!equal(*a.args[k], *b.args[k])) return false;
    return true;
}

}  // namespace fraclap
