#pragma once

// Closed-form scalar fields for metric entries, Randers covectors, Minkowski
// norms and warping functions. Grammar: + - * / ^, sin cos exp ln sqrt,
// numeric literals, pi/e, chart symbols x1..x9 (aliases t, theta -> x1,
// phi -> x2) and fiber-vector symbols y1..y9 (used by Minkowski norms).
// Trees evaluate on any scalar type, so dual numbers differentiate them.

#include <cctype>
#include <cstdio>
#include <string>
#include <vector>

#include "dual.hpp"
#include "errors.hpp"

namespace finsler {

enum class ExprOp { Num, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt };

struct ExprNode {
    ExprOp op;
    double num = 0.0;  // Num payload
    int index = 0;     // Var payload (0-based coordinate)
    int kid0 = -1;
    int kid1 = -1;
};

class Expr {
  public:
    Expr() = default;

    static Expr parse(const std::string& text);
    static Expr constant(double v) {
        Expr e;
        e.root_ = e.add({ExprOp::Num, v, 0, -1, -1});
        return e;
    }

    bool empty() const { return root_ < 0; }

    // Highest coordinate index (1-based) referenced per block; 0 if none.
    int max_x() const { return max_index(ExprOp::VarX); }
    int max_y() const { return max_index(ExprOp::VarY); }

    template <class T>
    T eval(const T* xs, int nx, const T* ys, int ny) const {
        if (root_ < 0) throw EngineError("evaluating empty expression");
        return eval_node<T>(root_, xs, nx, ys, ny);
    }

    std::string text() const { return root_ < 0 ? std::string() : render(root_, 0); }

  private:
    std::vector<ExprNode> nodes_;
    int root_ = -1;

    int add(ExprNode n) {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    int max_index(ExprOp which) const {
        int m = 0;
        for (const auto& n : nodes_)
            if (n.op == which && n.index + 1 > m) m = n.index + 1;
        return m;
    }

    template <class T>
    T eval_node(int i, const T* xs, int nx, const T* ys, int ny) const {
        const ExprNode& n = nodes_[static_cast<size_t>(i)];
        switch (n.op) {
            case ExprOp::Num:
                return T(n.num);
            case ExprOp::VarX:
                if (n.index >= nx) throw DimensionMismatch("expression uses x" + std::to_string(n.index + 1) + " beyond dimension " + std::to_string(nx));
                return xs[n.index];
            case ExprOp::VarY:
                if (n.index >= ny) throw DimensionMismatch("expression uses y" + std::to_string(n.index + 1) + " beyond dimension " + std::to_string(ny));
                return ys[n.index];
            case ExprOp::Add:
                return eval_node<T>(n.kid0, xs, nx, ys, ny) + eval_node<T>(n.kid1, xs, nx, ys, ny);
            case ExprOp::Sub:
                return eval_node<T>(n.kid0, xs, nx, ys, ny) - eval_node<T>(n.kid1, xs, nx, ys, ny);
            case ExprOp::Mul:
                return eval_node<T>(n.kid0, xs, nx, ys, ny) * eval_node<T>(n.kid1, xs, nx, ys, ny);
            case ExprOp::Div:
                return eval_node<T>(n.kid0, xs, nx, ys, ny) / eval_node<T>(n.kid1, xs, nx, ys, ny);
            case ExprOp::Pow: {
                T base = eval_node<T>(n.kid0, xs, nx, ys, ny);
                const ExprNode& en = nodes_[static_cast<size_t>(n.kid1)];
                if (en.op == ExprOp::Num) {
                    double p = en.num;
                    int k = static_cast<int>(p);
                    if (static_cast<double>(k) == p) return pow_int(base, k);
                    using std::pow;
                    return pow(base, p);
                }
                T expo = eval_node<T>(n.kid1, xs, nx, ys, ny);
                using std::exp;
                using std::log;
                return exp(expo * log(base));
            }
            case ExprOp::Neg:
                return -eval_node<T>(n.kid0, xs, nx, ys, ny);
            case ExprOp::Sin: {
                using std::sin;
                return sin(eval_node<T>(n.kid0, xs, nx, ys, ny));
            }
            case ExprOp::Cos: {
                using std::cos;
                return cos(eval_node<T>(n.kid0, xs, nx, ys, ny));
            }
            case ExprOp::Exp: {
                using std::exp;
                return exp(eval_node<T>(n.kid0, xs, nx, ys, ny));
            }
            case ExprOp::Log: {
                using std::log;
                return log(eval_node<T>(n.kid0, xs, nx, ys, ny));
            }
            case ExprOp::Sqrt: {
                using std::sqrt;
                return sqrt(eval_node<T>(n.kid0, xs, nx, ys, ny));
            }
        }
        throw EngineError("corrupt expression node");
    }

    // Minimal-parenthesis rendering; binary precedence 1 (+,-), 2 (*,/), 3 (^).
    std::string render(int i, int parent_prec) const {
        const ExprNode& n = nodes_[static_cast<size_t>(i)];
        auto wrap = [&](int prec, std::string s) { return prec < parent_prec ? "(" + s + ")" : s; };
        switch (n.op) {
            case ExprOp::Num: {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", n.num);
                std::string s(buf);
                return n.num < 0.0 ? wrap(2, s) : s;
            }
            case ExprOp::VarX:
                return "x" + std::to_string(n.index + 1);
            case ExprOp::VarY:
                return "y" + std::to_string(n.index + 1);
            case ExprOp::Add:
                return wrap(1, render(n.kid0, 1) + " + " + render(n.kid1, 1));
            case ExprOp::Sub:
                return wrap(1, render(n.kid0, 1) + " - " + render(n.kid1, 2));
            case ExprOp::Mul:
                return wrap(2, render(n.kid0, 2) + "*" + render(n.kid1, 2));
            case ExprOp::Div:
                return wrap(2, render(n.kid0, 2) + "/" + render(n.kid1, 3));
            case ExprOp::Pow:
                return wrap(3, render(n.kid0, 4) + "^" + render(n.kid1, 3));
            case ExprOp::Neg:
                return wrap(2, "-" + render(n.kid0, 4));
            case ExprOp::Sin:
                return "sin(" + render(n.kid0, 0) + ")";
            case ExprOp::Cos:
                return "cos(" + render(n.kid0, 0) + ")";
            case ExprOp::Exp:
                return "exp(" + render(n.kid0, 0) + ")";
            case ExprOp::Log:
                return "ln(" + render(n.kid0, 0) + ")";
            case ExprOp::Sqrt:
                return "sqrt(" + render(n.kid0, 0) + ")";
        }
        return "?";
    }

    friend class ExprParser;
};

class ExprParser {
  public:
    explicit ExprParser(const std::string& text) : s_(text) {}

    Expr run() {
        Expr e;
        e.root_ = parse_sum(e);
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

  private:
    const std::string& s_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(1, static_cast<int>(pos_) + 1, msg); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    int parse_sum(Expr& e) {
        int lhs = parse_product(e);
        for (;;) {
            if (eat('+'))
                lhs = e.add({ExprOp::Add, 0, 0, lhs, parse_product(e)});
            else if (eat('-'))
                lhs = e.add({ExprOp::Sub, 0, 0, lhs, parse_product(e)});
            else
                return lhs;
        }
    }

    int parse_product(Expr& e) {
        int lhs = parse_unary(e);
        for (;;) {
            if (eat('*'))
                lhs = e.add({ExprOp::Mul, 0, 0, lhs, parse_unary(e)});
            else if (eat('/'))
                lhs = e.add({ExprOp::Div, 0, 0, lhs, parse_unary(e)});
            else
                return lhs;
        }
    }

    int parse_unary(Expr& e) {
        if (eat('-')) return e.add({ExprOp::Neg, 0, 0, parse_unary(e), -1});
        if (eat('+')) return parse_unary(e);
        return parse_power(e);
    }

    int parse_power(Expr& e) {
        int base = parse_primary(e);
        if (eat('^')) {
            int expo = parse_unary(e);  // right-associative, -2 allowed as exponent
            return e.add({ExprOp::Pow, 0, 0, base, expo});
        }
        return base;
    }

    int parse_primary(Expr& e) {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number(e);
        if (c == '(') {
            ++pos_;
            int inner = parse_sum(e);
            if (!eat(')')) fail("missing ')'");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident(e);
        fail(std::string("unexpected character '") + c + "'");
    }

    int parse_number(Expr& e) {
        size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            size_t mark = pos_++;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            else
                pos_ = mark;  // the 'e' belonged to something else
        }
        try {
            return e.add({ExprOp::Num, std::stod(s_.substr(start, pos_ - start)), 0, -1, -1});
        } catch (const std::exception&) {
            fail("malformed number");
        }
    }

    int parse_ident(Expr& e) {
        size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        std::string name = s_.substr(start, pos_ - start);

        if (name == "sin" || name == "cos" || name == "exp" || name == "ln" || name == "log" || name == "sqrt") {
            if (!eat('(')) fail("function '" + name + "' needs '('");
            int arg = parse_sum(e);
            if (!eat(')')) fail("missing ')' after '" + name + "'");
            ExprOp op = name == "sin"    ? ExprOp::Sin
                        : name == "cos"  ? ExprOp::Cos
                        : name == "exp"  ? ExprOp::Exp
                        : name == "sqrt" ? ExprOp::Sqrt
                                         : ExprOp::Log;
            return e.add({op, 0, 0, arg, -1});
        }
        if (name == "pi") return e.add({ExprOp::Num, 3.14159265358979323846, 0, -1, -1});
        if (name == "e") return e.add({ExprOp::Num, 2.71828182845904523536, 0, -1, -1});
        if (name == "t" || name == "theta") return e.add({ExprOp::VarX, 0, 0, -1, -1});
        if (name == "phi") return e.add({ExprOp::VarX, 0, 1, -1, -1});
        if ((name[0] == 'x' || name[0] == 'y') && name.size() >= 2) {
            bool digits = true;
            for (size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                int idx = std::stoi(name.substr(1));
                if (idx < 1 || idx > 9) fail("coordinate index out of range in '" + name + "'");
                return e.add({name[0] == 'x' ? ExprOp::VarX : ExprOp::VarY, 0, idx - 1, -1, -1});
            }
        }
        throw UnknownSymbol("unknown symbol '" + name + "'");
    }
};

inline Expr Expr::parse(const std::string& text) { return ExprParser(text).run(); }

}  // namespace finsler
