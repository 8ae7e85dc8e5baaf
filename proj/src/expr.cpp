#include "nlwave/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <charconv>
#include <stdexcept>

namespace nlwave {

namespace {

using Fn = Real (*)(Real);

struct NamedFn {
  const char* name;
  Fn fn;
};

constexpr std::array<NamedFn, 10> kFunctions{{
    {"sin", std::sin},
    {"cos", std::cos},
    {"tan", std::tan},
    {"sinh", std::sinh},
    {"cosh", std::cosh},
    {"tanh", std::tanh},
    {"exp", std::exp},
    {"log", std::log},
    {"sqrt", std::sqrt},
    {"abs", std::fabs},
}};

}  // namespace

class ExprParser {
 public:
  ExprParser(const std::string& text, const std::vector<std::string>& variables,
             Expr& out)
      : text_(text), variables_(variables), out_(out) {}

  void run() {
    parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    int depth = 0, max_depth = 0;
    for (const auto& instr : out_.program_) {
      if (instr.op == Expr::Op::PushConst || instr.op == Expr::Op::PushVar)
        ++depth;
      else if (instr.op != Expr::Op::Neg && instr.op != Expr::Op::Call1)
        --depth;
      max_depth = std::max(max_depth, depth);
    }
    if (max_depth > 64) fail("expression too deeply nested");
  }

 private:
  const std::string& text_;
  const std::vector<std::string>& variables_;
  Expr& out_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression '" + text_ + "': " + what +
                                " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void emit(Expr::Op op, Real value = 0.0, int index = 0) {
    out_.program_.push_back({op, value, index});
  }

  void parse_sum() {
    parse_product();
    while (true) {
      if (consume('+')) {
        parse_product();
        emit(Expr::Op::Add);
      } else if (consume('-')) {
        parse_product();
        emit(Expr::Op::Sub);
      } else {
        return;
      }
    }
  }

  void parse_product() {
    parse_unary();
    while (true) {
      if (consume('*')) {
        parse_unary();
        emit(Expr::Op::Mul);
      } else if (consume('/')) {
        parse_unary();
        emit(Expr::Op::Div);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    bool negate = false;
    while (true) {
      if (consume('-'))
        negate = !negate;
      else if (consume('+'))
        continue;
      else
        break;
    }
    parse_power();
    if (negate) emit(Expr::Op::Neg);
  }

  void parse_power() {
    parse_atom();
    if (consume('^')) {
      parse_unary();  // right associative, binds tighter than unary on the right
      emit(Expr::Op::Pow);
    }
  }

  void parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      parse_sum();
      if (!consume(')')) fail("missing ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      Real value = 0.0;
      const char* begin = text_.data() + pos_;
      const char* end = text_.data() + text_.size();
      auto res = std::from_chars(begin, end, value);
      if (res.ec != std::errc{}) fail("malformed number");
      pos_ += static_cast<std::size_t>(res.ptr - begin);
      emit(Expr::Op::PushConst, value);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
      const std::string name = text_.substr(start, pos_ - start);
      if (peek() == '(') {
        for (std::size_t f = 0; f < kFunctions.size(); ++f)
          if (name == kFunctions[f].name) {
            consume('(');
            parse_sum();
            if (!consume(')')) fail("missing ')'");
            emit(Expr::Op::Call1, 0.0, static_cast<int>(f));
            return;
          }
        fail("unknown function '" + name + "'");
      }
      if (name == "pi") {
        emit(Expr::Op::PushConst, M_PI);
        return;
      }
      if (name == "e") {
        emit(Expr::Op::PushConst, M_E);
        return;
      }
      for (std::size_t v = 0; v < variables_.size(); ++v)
        if (name == variables_[v]) {
          emit(Expr::Op::PushVar, 0.0, static_cast<int>(v));
          return;
        }
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

Expr Expr::parse(const std::string& text,
                 const std::vector<std::string>& variables) {
  Expr expr;
  expr.text_ = text;
  expr.n_vars_ = variables.size();
  ExprParser(text, variables, expr).run();
  return expr;
}

Real Expr::eval(const std::vector<Real>& values) const {
  if (values.size() != n_vars_)
    throw std::invalid_argument("Expr::eval: wrong number of variable values");
  Real stack[64];
  int top = -1;
  for (const Instr& instr : program_) {
    switch (instr.op) {
      case Op::PushConst:
        stack[++top] = instr.value;
        break;
      case Op::PushVar:
        stack[++top] = values[static_cast<std::size_t>(instr.index)];
        break;
      case Op::Add:
        stack[top - 1] += stack[top];
        --top;
        break;
      case Op::Sub:
        stack[top - 1] -= stack[top];
        --top;
        break;
      case Op::Mul:
        stack[top - 1] *= stack[top];
        --top;
        break;
      case Op::Div:
        stack[top - 1] /= stack[top];
        --top;
        break;
      case Op::Pow:
        stack[top - 1] = std::pow(stack[top - 1], stack[top]);
        --top;
        break;
      case Op::Neg:
        stack[top] = -stack[top];
        break;
      case Op::Call1:
        stack[top] = kFunctions[static_cast<std::size_t>(instr.index)].fn(stack[top]);
        break;
    }
  }
  return stack[0];
}

}  // namespace nlwave
