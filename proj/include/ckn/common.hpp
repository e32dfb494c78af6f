// Shared basics: error type, numeric constants, small helpers.
#ifndef CKN_COMMON_HPP
#define CKN_COMMON_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace ckn {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// All hard failures carry a short machine-readable code (e.g. "QOutOfRange")
// next to the human-readable message.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

private:
  std::string code_;
};

[[noreturn]] inline void raise(const char* code, const std::string& msg) {
  throw Error(code, msg);
}

inline bool rel_close(double a, double b, double tol) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return true;
  return std::abs(a - b) <= tol * scale;
}

inline double sq(double x) { return x * x; }

}  // namespace ckn

#endif
