/**
 * @file expr.hpp
 * @brief Arithmetic expressions in x, y, z for frames read from files.
 *
 * Grammar (right-associative ^, unary minus binds looser than ^):
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := ('-' | '+') unary | power
 *   power   := primary ('^' unary)?
 *   primary := number | x | y | z | pi | fn '(' expr ')' | '(' expr ')'
 *   fn      := sin | cos | exp | sqrt | atan
 * Evaluation is generic in the scalar type so parsed frames get exact jets.
 */
#pragma once

#include "srtight/errors.hpp"
#include "srtight/jet.hpp"
#include "srtight/small.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace srtight {

class Expr {
public:
    enum class Op { Num, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Sqrt, Atan };

    static Expr parse(const std::string& text) {
        Parser p{text, 0};
        Expr e;
        e.root_ = p.expr();
        p.skip();
        if (p.pos != text.size()) p.fail("unexpected trailing input");
        e.text_ = text;
        return e;
    }

    const std::string& text() const { return text_; }

    template <class T>
    T operator()(const Vec3<T>& q) const {
        return eval(*root_, q);
    }

private:
    struct Node {
        Op op = Op::Num;
        double num = 0.0;
        int var = 0;
        std::shared_ptr<const Node> a, b;
    };
    using NodePtr = std::shared_ptr<const Node>;

    static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }
    static NodePtr number(double v) {
        auto n = std::make_shared<Node>();
        n->num = v;
        return n;
    }

    struct Parser {
        const std::string& s;
        std::size_t pos;

        [[noreturn]] void fail(const std::string& msg) const {
            throw Error(ErrorKind::Parse, msg + " at column " + std::to_string(pos + 1) + " in '" + s + "'");
        }
        void skip() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char c) {
            skip();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }
        NodePtr expr() {
            NodePtr l = term();
            for (;;) {
                if (eat('+')) l = make(Op::Add, l, term());
                else if (eat('-')) l = make(Op::Sub, l, term());
                else return l;
            }
        }
        NodePtr term() {
            NodePtr l = unary();
            for (;;) {
                if (eat('*')) l = make(Op::Mul, l, unary());
                else if (eat('/')) l = make(Op::Div, l, unary());
                else return l;
            }
        }
        NodePtr unary() {
            if (eat('-')) return make(Op::Neg, unary());
            if (eat('+')) return unary();
            return power();
        }
        NodePtr power() {
            NodePtr base = primary();
            if (eat('^')) return make(Op::Pow, base, unary());
            return base;
        }
        NodePtr primary() {
            skip();
            if (pos >= s.size()) fail("unexpected end of input");
            const char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::size_t used = 0;
                double v = 0;
                try {
                    v = std::stod(s.substr(pos), &used);
                } catch (const std::exception&) {
                    fail("malformed number");
                }
                pos += used;
                return number(v);
            }
            if (eat('(')) {
                NodePtr e = expr();
                if (!eat(')')) fail("expected ')'");
                return e;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t b = pos;
                while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
                const std::string id = s.substr(b, pos - b);
                if (id == "x" || id == "y" || id == "z") {
                    auto n = std::make_shared<Node>();
                    n->op = Op::Var;
                    n->var = id[0] - 'x';
                    return n;
                }
                if (id == "pi") return number(std::numbers::pi);
                Op op;
                if (id == "sin") op = Op::Sin;
                else if (id == "cos") op = Op::Cos;
                else if (id == "exp") op = Op::Exp;
                else if (id == "sqrt") op = Op::Sqrt;
                else if (id == "atan") op = Op::Atan;
                else {
                    pos = b;
                    fail("unknown identifier '" + id + "'");
                }
                if (!eat('(')) fail("expected '(' after " + id);
                NodePtr arg = expr();
                if (!eat(')')) fail("expected ')'");
                return make(op, arg);
            }
            fail(std::string("unexpected character '") + c + "'");
        }
    };

    template <class T>
    static T eval(const Node& n, const Vec3<T>& q) {
        switch (n.op) {
        case Op::Num: return T(n.num);
        case Op::Var: return q[static_cast<std::size_t>(n.var)];
        case Op::Add: return eval(*n.a, q) + eval(*n.b, q);
        case Op::Sub: return eval(*n.a, q) - eval(*n.b, q);
        case Op::Mul: return eval(*n.a, q) * eval(*n.b, q);
        case Op::Div: return eval(*n.a, q) / eval(*n.b, q);
        case Op::Neg: return -eval(*n.a, q);
        case Op::Sin: return sin(eval(*n.a, q));
        case Op::Cos: return cos(eval(*n.a, q));
        case Op::Exp: return exp(eval(*n.a, q));
        case Op::Sqrt: return sqrt(eval(*n.a, q));
        case Op::Atan: return atan(eval(*n.a, q));
        case Op::Pow: {
            const T base = eval(*n.a, q);
            if (n.b->op == Op::Num) {
                const double p = n.b->num;
                if (p == std::round(p) && std::abs(p) <= 64) return ipow(base, static_cast<int>(p));
                return pow(base, p);
            }
            return exp(eval(*n.b, q) * log(base));
        }
        }
        return T(0.0);
    }

    NodePtr root_;
    std::string text_;
};

} // namespace srtight
