#pragma once

#include "clarith/syntax.hpp"

#include <string>
#include <string_view>

namespace clarith {

// Concrete grammar (Unicode form first, ASCII alias after the slash):
//
//   sequent  ::= [formula {"," formula}] ("⟹" | "=>" | "∘–") formula | formula
//   formula  ::= orlevel ["→"/"->" formula]                 right associative
//   orlevel  ::= andlevel {("∨"/"\/") andlevel} | andlevel {("⊔"/"||") andlevel}
//   andlevel ::= unary {("∧"/"/\") unary} | unary {("⊓"/"&&") unary}
//   unary    ::= ("¬"/"~") unary | quant var unary | "(" formula ")" | "⊤"/"true"
//              | "⊥"/"false" | term rel term | letter ["(" term {"," term} ")"]
//   quant    ::= "∀"/"!" | "∃"/"?" | "⊓"/"!!" | "⊔"/"??"   (ASCII forms take "var:")
//   rel      ::= "=" | "≠"/"!=" | "≤"/"<=" | "<"
//   term     ::= product {"+" product}
//   product  ::= postfix {("×"/"*"/"·") postfix}
//   postfix  ::= primary {"′"/"'" | "0" | "1" | "³"}      digits are the 𝟎/𝟏 successors
//   primary  ::= numeral | var | letter "(" terms ")" | "(" term ")" | "|" term "|"
//              | "2^" postfix | "[" term "]_" postfix ["^" postfix]
//
// Mixing ∧ with ⊓ (or ∨ with ⊔) without parentheses is a syntax error.
// Identifiers are letters optionally followed by "_digits"; a numeral right
// after an identifier or closing parenthesis spells binary successors.

struct ParseOptions {
    // Reject instead of renaming when a variable is both free and bound.
    bool strict_hygiene = false;
};

FormulaP parse_formula(std::string_view text, const ParseOptions& opt = {});
Sequent parse_sequent(std::string_view text, const ParseOptions& opt = {});
TermP parse_term(std::string_view text);

enum class Style { Unicode, Ascii };

std::string print(const TermP& t, Style st = Style::Unicode);
std::string print(const FormulaP& f, Style st = Style::Unicode);
std::string print(const Sequent& s, Style st = Style::Unicode);

}  // namespace clarith
