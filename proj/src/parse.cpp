#include "jetsolve/expr.hpp"

#include <cctype>

namespace jetsolve {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error("column " + std::to_string(position + 1) + ": " + message), position_(position) {}

namespace {

class Parser {
public:
    Parser(const std::string& text, const SymbolTable& table) : text_(text), table_(table) {}

    Expr run() {
        Expr e = expression();
        skip_space();
        if (pos_ < text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    const std::string& text_;
    const SymbolTable& table_;
    std::size_t pos_ = 0;

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    Expr expression() {
        Expr e = term();
        for (;;) {
            if (accept('+')) {
                e = e + term();
            } else if (accept('-')) {
                e = e - term();
            } else {
                return e;
            }
        }
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            if (accept('*')) {
                e = e * unary();
            } else if (accept('/')) {
                skip_space();
                const std::size_t at = pos_;
                Expr d = unary();
                if (d.is_zero()) throw ParseError("division by zero", at);
                try {
                    e = e / d;
                } catch (const std::domain_error& err) {
                    throw ParseError(err.what(), at);
                }
            } else {
                return e;
            }
        }
    }

    Expr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr b = primary();
        if (accept('^')) {
            skip_space();
            const std::size_t at = pos_;
            Expr ex = unary();
            try {
                return pow(b, ex);
            } catch (const std::domain_error& err) {
                throw ParseError(err.what(), at);
            } catch (const std::overflow_error& err) {
                throw ParseError(err.what(), at);
            }
        }
        return b;
    }

    Expr primary() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        if (c == '(') {
            ++pos_;
            Expr e = expression();
            expect(')');
            return e;
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string digits = text_.substr(start, pos_ - start);
        Integer den = 1;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            const std::size_t frac = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ == frac) throw ParseError("malformed number", start);
            digits += text_.substr(frac, pos_ - frac);
            for (std::size_t i = frac; i < pos_; ++i) den *= 10;
        }
        Rational v(Integer(digits), den);
        v.canonicalize();
        return Expr(v);
    }

    Expr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            Expr a = expression();
            expect(')');
            if (name == "exp") return exp(a);
            if (name == "log" || name == "ln") return log(a);
            if (name == "sqrt") return sqrt(a);
            if (name == "sin") return sin(a);
            if (name == "cos") return cos(a);
            throw ParseError("unknown function '" + name + "'", start);
        }
        if (auto s = table_.resolve(name)) return Expr(*s);
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

}  // namespace

Expr parse(const std::string& text, const SymbolTable& table) { return Parser(text, table).run(); }

}  // namespace jetsolve
