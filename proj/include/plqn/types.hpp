#ifndef PLQN_TYPES_HPP
#define PLQN_TYPES_HPP

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace plqn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A value in R ∪ {+∞}. Arithmetic on +∞ is never performed implicitly.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : value_(v) {}  // NOLINT: implicit from finite doubles

  static constexpr ExtReal infinity() {
    ExtReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  /// Throws if the value is +∞.
  double value() const {
    if (infinite_) throw std::logic_error("ExtReal: value() of +inf");
    return value_;
  }

  std::string str() const;

  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

// Error hierarchy. Each carries a module tag so the CLI can report context.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

#define PLQN_DEFINE_ERROR(Name)                                              \
  class Name : public Error {                                                \
   public:                                                                   \
    using Error::Error;                                                      \
  };

PLQN_DEFINE_ERROR(DomainError)
PLQN_DEFINE_ERROR(RepresentationError)
PLQN_DEFINE_ERROR(ArgumentError)
PLQN_DEFINE_ERROR(PreconditionError)
PLQN_DEFINE_ERROR(MembershipError)
PLQN_DEFINE_ERROR(SmoothCaseError)
PLQN_DEFINE_ERROR(StepError)
PLQN_DEFINE_ERROR(DivergenceError)
PLQN_DEFINE_ERROR(RegimeError)
PLQN_DEFINE_ERROR(SchemaError)
PLQN_DEFINE_ERROR(ParseError)

#undef PLQN_DEFINE_ERROR

}  // namespace plqn

#endif  // PLQN_TYPES_HPP
