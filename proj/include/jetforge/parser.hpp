#ifndef JETFORGE_PARSER_HPP
#define JETFORGE_PARSER_HPP

#include <cctype>
#include <map>
#include <string>

#include "jetforge/expr.hpp"

namespace jetforge {

// The set of names an expression may reference. Jet coordinates register
// under their written form ("u1" in one independent variable, "u[1,2]" in
// several), so the parser only ever does name lookups.
class Vocabulary {
  public:
    void add(SymbolId id) { names_[symbol_name(id)] = id; }

    SymbolId add_param(const std::string& name) {
        SymbolId id = intern_param(name);
        add(id);
        return id;
    }

    bool lookup(const std::string& name, SymbolId& out) const {
        auto it = names_.find(name);
        if (it == names_.end()) return false;
        out = it->second;
        return true;
    }

    const std::map<std::string, SymbolId>& names() const { return names_; }

  private:
    std::map<std::string, SymbolId> names_;
};

namespace detail {

class Parser {
  public:
    Parser(const std::string& text, const Vocabulary& vocab)
        : text_(text), vocab_(vocab) {}

    Expr parse() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size())
            throw SyntaxError("unexpected trailing input", pos_);
        return e;
    }

  private:
    const std::string& text_;
    const Vocabulary& vocab_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    void expect(char c) {
        if (!accept(c))
            throw SyntaxError(std::string("expected '") + c + "'", pos_);
    }

    Expr parse_sum() {
        Expr e = parse_product();
        for (;;) {
            if (accept('+'))
                e = e + parse_product();
            else if (accept('-'))
                e = e - parse_product();
            else
                return e;
        }
    }

    Expr parse_product() {
        Expr e = parse_unary();
        for (;;) {
            if (accept('*'))
                e = e * parse_unary();
            else if (accept('/'))
                e = e / parse_unary();
            else
                return e;
        }
    }

    Expr parse_unary() {
        if (accept('-')) return -parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (!accept('^')) return base;
        Rational e = parse_exponent();
        return expr_pow(base, e, false);
    }

    // Exponents are integers or parenthesized integer fractions.
    Rational parse_exponent() {
        skip_ws();
        if (accept('(')) {
            bool neg = accept('-');
            Integer num = parse_integer();
            Integer den = 1;
            if (accept('/')) den = parse_integer();
            expect(')');
            if (den == 0) throw DivisionByZero("zero exponent denominator");
            Rational r(neg ? Integer(-num) : num, den);
            r.canonicalize();
            return r;
        }
        bool neg = accept('-');
        Integer num = parse_integer();
        return Rational(neg ? Integer(-num) : num);
    }

    Integer parse_integer() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == start) throw SyntaxError("expected an integer", pos_);
        return Integer(text_.substr(start, pos_ - start));
    }

    Expr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size())
            throw SyntaxError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)))
            return Expr::from_rational(Rational(parse_integer()));
        if (accept('(')) {
            Expr e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_symbol();
        throw SyntaxError("unexpected character", pos_);
    }

    Expr parse_symbol() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               std::isalnum(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        std::string name = text_.substr(start, pos_ - start);
        // Multi-variable jet coordinates are written name[i,j,...]; normalize
        // the written form and look the whole thing up.
        if (pos_ < text_.size() && text_[pos_] == '[') {
            name += '[';
            ++pos_;
            for (;;) {
                name += parse_integer().get_str();
                if (accept(',')) {
                    name += ',';
                    continue;
                }
                expect(']');
                name += ']';
                break;
            }
        }
        SymbolId id;
        if (!vocab_.lookup(name, id)) throw UnknownSymbol(name);
        return Expr::sym(id);
    }
};

} // namespace detail

inline Expr parse(const std::string& text, const Vocabulary& vocab) {
    return detail::Parser(text, vocab).parse();
}

} // namespace jetforge

#endif
