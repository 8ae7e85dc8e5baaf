#pragma once

#include <string>
#include <vector>

#include "nlwave/types.hpp"

namespace nlwave {

/// Arithmetic expression compiled from text, for config-supplied pointwise
/// functions (forcing profiles, kernel factors, custom nonlinearities).
///
/// Grammar: + - * / ^ (right-assoc), parentheses, unary minus, the constants
/// pi and e, one-argument functions sin cos tan sinh cosh tanh exp log sqrt
/// abs, and the variables named at parse time. Anything else is a config
/// error (std::invalid_argument).
class Expr {
 public:
  static Expr parse(const std::string& text,
                    const std::vector<std::string>& variables);

  /// Evaluates with values[i] bound to variables[i].
  Real eval(const std::vector<Real>& values) const;

  Real eval1(Real x) const { return eval({x}); }
  Real eval2(Real x, Real y) const { return eval({x, y}); }

  std::size_t arity() const { return n_vars_; }
  const std::string& text() const { return text_; }

 private:
  enum class Op : std::uint8_t {
    PushConst,
    PushVar,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Call1,
  };
  struct Instr {
    Op op;
    Real value = 0.0;  // PushConst
    int index = 0;     // PushVar: variable slot; Call1: function id
  };

  std::string text_;
  std::vector<Instr> program_;
  std::size_t n_vars_ = 0;

  friend class ExprParser;
};

}  // namespace nlwave
