#include "plqn/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace plqn {

namespace {

constexpr const char* kModule = "expr_ad";

class Parser {
 public:
  Parser(const std::string& text, int n) : s_(text), n_(n) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(kModule, "position " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char ch) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  static Expr binary(Expr::Kind k, Expr a, Expr b) {
    Expr e;
    e.kind = k;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
  }

  static Expr unary(Expr::Kind k, Expr a) {
    Expr e;
    e.kind = k;
    e.args.push_back(std::move(a));
    return e;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Expr::Kind::Add, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = binary(Expr::Kind::Sub, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Expr::Kind::Mul, std::move(lhs), factor());
      } else if (accept('/')) {
        lhs = binary(Expr::Kind::Div, std::move(lhs), factor());
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    Expr b = base();
    if (!accept('^')) return b;
    skip_ws();
    bool neg = false;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      neg = s_[pos_] == '-';
      ++pos_;
    }
    const size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer exponent");
    if (pos_ - start > 6) fail("exponent too large");
    Expr e = unary(Expr::Kind::Pow, std::move(b));
    e.index = std::stoi(s_.substr(start, pos_ - start)) * (neg ? -1 : 1);
    return e;
  }

  Expr number() {
    const size_t start = pos_;
    auto digits = [&] {
      size_t d = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
        ++d;
      }
      return d;
    };
    size_t nd = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) fail("malformed number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent in number");
    }
    Expr e;
    e.kind = Expr::Kind::Const;
    e.value = std::strtod(s_.substr(start, pos_ - start).c_str(), nullptr);
    return e;
  }

  Expr base() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char ch = s_[pos_];
    if (ch == '-') {
      ++pos_;
      return unary(Expr::Kind::Neg, base());
    }
    if (ch == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      const size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string word = s_.substr(start, pos_ - start);
      if (word == "x") {
        const size_t ds = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (ds == pos_ || pos_ - ds > 6) {
          pos_ = start;
          fail("expected a variable index after 'x'");
        }
        const int idx = std::stoi(s_.substr(ds, pos_ - ds));
        if (idx < 1 || idx > n_) {
          pos_ = start;
          fail("variable x" + std::to_string(idx) + " out of range 1.." + std::to_string(n_));
        }
        Expr e;
        e.kind = Expr::Kind::Var;
        e.index = idx - 1;
        return e;
      }
      Expr::Kind k;
      if (word == "sin") {
        k = Expr::Kind::Sin;
      } else if (word == "cos") {
        k = Expr::Kind::Cos;
      } else if (word == "exp") {
        k = Expr::Kind::Exp;
      } else if (word == "log") {
        k = Expr::Kind::Log;
      } else if (word == "sqrt") {
        k = Expr::Kind::Sqrt;
      } else {
        pos_ = start;
        fail("unknown identifier '" + word + "'");
      }
      if (!accept('(')) fail("expected '(' after " + word);
      Expr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return unary(k, std::move(arg));
    }
    fail("unexpected '" + std::string(1, ch) + "'");
  }

  const std::string& s_;
  int n_;
  size_t pos_ = 0;
};

// Dual numbers; nesting gives second derivatives.
template <class T>
struct Dual {
  T v{};
  T d{};
  Dual() = default;
  Dual(double x) : v(x), d(0.0) {}  // NOLINT: constants lift implicitly
  Dual(T value, T deriv) : v(value), d(deriv) {}
};

double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) {
  return primal(x.v);
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  if (primal(b) == 0.0) throw DomainError(kModule, "division by zero");
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}

double d_div(double a, double b) {
  if (b == 0.0) throw DomainError(kModule, "division by zero");
  return a / b;
}
template <class T>
Dual<T> d_div(const Dual<T>& a, const Dual<T>& b) {
  return a / b;
}

double d_sin(double x) { return std::sin(x); }
double d_cos(double x) { return std::cos(x); }
double d_exp(double x) { return std::exp(x); }
double d_log(double x) {
  if (x <= 0.0) throw DomainError(kModule, "log of a nonpositive argument");
  return std::log(x);
}
double d_sqrt(double x) {
  if (x < 0.0) throw DomainError(kModule, "sqrt of a negative argument");
  return std::sqrt(x);
}
double d_powi(double x, int k) {
  if (k < 0 && x == 0.0) throw DomainError(kModule, "division by zero in negative power");
  double r = 1.0;
  double b = k < 0 ? 1.0 / x : x;
  for (int e = std::abs(k); e > 0; e >>= 1) {
    if (e & 1) r *= b;
    b *= b;
  }
  return r;
}

template <class T>
Dual<T> d_sin(const Dual<T>& a) {
  return {d_sin(a.v), d_cos(a.v) * a.d};
}
template <class T>
Dual<T> d_cos(const Dual<T>& a) {
  return {d_cos(a.v), -(d_sin(a.v) * a.d)};
}
template <class T>
Dual<T> d_exp(const Dual<T>& a) {
  const T e = d_exp(a.v);
  return {e, e * a.d};
}
template <class T>
Dual<T> d_log(const Dual<T>& a) {
  return {d_log(a.v), d_div(a.d, a.v)};
}
template <class T>
Dual<T> d_sqrt(const Dual<T>& a) {
  if (primal(a) <= 0.0) throw DomainError(kModule, "sqrt is not differentiable at a nonpositive argument");
  const T s = d_sqrt(a.v);
  return {s, d_div(a.d, T(2.0) * s)};
}
template <class T>
Dual<T> d_powi(const Dual<T>& a, int k) {
  if (k == 0) return Dual<T>(1.0);
  return {d_powi(a.v, k), T(static_cast<double>(k)) * d_powi(a.v, k - 1) * a.d};
}

template <class T>
T eval_t(const Expr& e, const std::vector<T>& x) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Const:
      return T(e.value);
    case K::Var:
      return x[static_cast<size_t>(e.index)];
    case K::Add:
      return eval_t(e.args[0], x) + eval_t(e.args[1], x);
    case K::Sub:
      return eval_t(e.args[0], x) - eval_t(e.args[1], x);
    case K::Mul:
      return eval_t(e.args[0], x) * eval_t(e.args[1], x);
    case K::Div:
      return d_div(eval_t(e.args[0], x), eval_t(e.args[1], x));
    case K::Pow:
      return d_powi(eval_t(e.args[0], x), e.index);
    case K::Neg:
      return -eval_t(e.args[0], x);
    case K::Sin:
      return d_sin(eval_t(e.args[0], x));
    case K::Cos:
      return d_cos(eval_t(e.args[0], x));
    case K::Exp:
      return d_exp(eval_t(e.args[0], x));
    case K::Log:
      return d_log(eval_t(e.args[0], x));
    case K::Sqrt:
      return d_sqrt(eval_t(e.args[0], x));
  }
  return T(0.0);
}

void print(const Expr& e, std::string& out) {
  using K = Expr::Kind;
  auto bin = [&](const char* op) {
    out += '(';
    print(e.args[0], out);
    out += op;
    print(e.args[1], out);
    out += ')';
  };
  auto fn = [&](const char* name) {
    out += name;
    out += '(';
    print(e.args[0], out);
    out += ')';
  };
  switch (e.kind) {
    case K::Const: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", std::abs(e.value));
      if (std::signbit(e.value)) {
        out += "-(";
        out += buf;
        out += ')';
      } else {
        out += buf;
      }
      return;
    }
    case K::Var:
      out += 'x' + std::to_string(e.index + 1);
      return;
    case K::Add:
      return bin("+");
    case K::Sub:
      return bin("-");
    case K::Mul:
      return bin("*");
    case K::Div:
      return bin("/");
    case K::Pow:
      out += '(';
      print(e.args[0], out);
      out += ")^" + std::to_string(e.index);
      return;
    case K::Neg:
      return fn("-");
    case K::Sin:
      return fn("sin");
    case K::Cos:
      return fn("cos");
    case K::Exp:
      return fn("exp");
    case K::Log:
      return fn("log");
    case K::Sqrt:
      return fn("sqrt");
  }
}

template <class F>
auto with_component(int i, F&& f) {
  try {
    return f();
  } catch (const DomainError& err) {
    throw DomainError(kModule, "component " + std::to_string(i + 1) + ": " +
                                   std::string(err.what()).substr(std::string(kModule).size() + 2));
  }
}

void check_x(const SmoothMap& c, const Vec& x) {
  if (x.size() != c.n)
    throw ArgumentError(kModule, "x has size " + std::to_string(x.size()) + ", expected " + std::to_string(c.n));
}

}  // namespace

Expr parse_expr(const std::string& text, int n) { return Parser(text, n).parse(); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

double eval_expr(const Expr& e, const Vec& x) {
  std::vector<double> xs(x.data(), x.data() + x.size());
  return eval_t(e, xs);
}

SmoothMap parse_map(const std::vector<std::string>& texts, int n) {
  SmoothMap c;
  c.n = n;
  for (size_t i = 0; i < texts.size(); ++i) {
    try {
      c.components.push_back(parse_expr(texts[i], n));
    } catch (const ParseError& err) {
      throw ParseError(kModule, "component " + std::to_string(i + 1) + ": " +
                                    std::string(err.what()).substr(std::string(kModule).size() + 2));
    }
  }
  return c;
}

Vec map_value(const SmoothMap& c, const Vec& x) {
  check_x(c, x);
  Vec v(c.m());
  for (int i = 0; i < c.m(); ++i) v(i) = with_component(i, [&] { return eval_expr(c.components[static_cast<size_t>(i)], x); });
  return v;
}

Mat map_jacobian(const SmoothMap& c, const Vec& x) {
  check_x(c, x);
  using D1 = Dual<double>;
  Mat J(c.m(), c.n);
  std::vector<D1> xs(static_cast<size_t>(c.n));
  for (int a = 0; a < c.n; ++a) {
    for (int p = 0; p < c.n; ++p) xs[static_cast<size_t>(p)] = D1(x(p), p == a ? 1.0 : 0.0);
    for (int i = 0; i < c.m(); ++i)
      J(i, a) = with_component(i, [&] { return eval_t(c.components[static_cast<size_t>(i)], xs).d; });
  }
  return J;
}

Mat weighted_hessian(const SmoothMap& c, const Vec& x, const Vec& y) {
  check_x(c, x);
  if (y.size() != c.m())
    throw ArgumentError(kModule, "y has size " + std::to_string(y.size()) + ", expected " + std::to_string(c.m()));
  using D1 = Dual<double>;
  using D2 = Dual<D1>;
  Mat H = Mat::Zero(c.n, c.n);
  std::vector<D2> xs(static_cast<size_t>(c.n));
  for (int a = 0; a < c.n; ++a) {
    for (int b = a; b < c.n; ++b) {
      for (int p = 0; p < c.n; ++p)
        xs[static_cast<size_t>(p)] = D2(D1(x(p), p == b ? 1.0 : 0.0), D1(p == a ? 1.0 : 0.0, 0.0));
      double s = 0.0;
      for (int i = 0; i < c.m(); ++i) {
        if (y(i) == 0.0) continue;
        s += y(i) * with_component(i, [&] { return eval_t(c.components[static_cast<size_t>(i)], xs).d.d; });
      }
      H(a, b) = s;
      H(b, a) = s;
    }
  }
  return H;
}

MapEval evaluate_map(const SmoothMap& c, const Vec& x, const Vec* y) {
  MapEval out;
  out.value = map_value(c, x);
  out.jacobian = map_jacobian(c, x);
  if (y) out.weighted_hessian = weighted_hessian(c, x, *y);
  return out;
}

}  // namespace plqn
