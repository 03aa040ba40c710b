#include "porosplit/rate.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace porosplit {

double RateFunction::operator()(double t) const {
  if (kind == Kind::constant) return scale;
  return scale * std::sin(omega * t + phase);
}

namespace {

class RateParser {
 public:
  explicit RateParser(std::string_view text) : text_(text) {}

  RateFunction parse() {
    skip_ws();
    double factor = 1.0;
    if (!at_word("sin")) {
      factor = number();
      skip_ws();
      if (pos_ == text_.size()) return RateFunction::constant(factor);
      expect('*');
      skip_ws();
    }
    if (!at_word("sin")) fail("expected sin(...)");
    pos_ += 3;
    skip_ws();
    expect('(');
    double omega = 0.0;
    double phase = 0.0;
    linear(omega, phase);
    expect(')');
    skip_ws();
    if (pos_ < text_.size()) {
      expect('*');
      skip_ws();
      factor *= number();
      skip_ws();
    }
    if (pos_ != text_.size()) fail("trailing characters");
    return RateFunction::sine(factor, omega, phase);
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("rate expression '" + std::string(text_) + "': " + why +
                                " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_word(std::string_view w) const { return text_.substr(pos_, w.size()) == w; }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
    skip_ws();
  }

  double number() {
    skip_ws();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  // factor := number | pi | t
  // term := ['-'] factor (('*' | '/') factor)*
  void linear(double& omega, double& phase) {
    bool first = true;
    while (true) {
      skip_ws();
      double sign = 1.0;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        sign = text_[pos_] == '-' ? -1.0 : 1.0;
        ++pos_;
      } else if (!first) {
        return;
      }
      first = false;
      double coeff = 1.0;
      bool has_t = false;
      bool divide = false;
      while (true) {
        skip_ws();
        if (at_word("pi")) {
          pos_ += 2;
          coeff = divide ? coeff / std::numbers::pi : coeff * std::numbers::pi;
        } else if (pos_ < text_.size() && text_[pos_] == 't') {
          if (has_t || divide) fail("t may appear once, in a numerator");
          has_t = true;
          ++pos_;
        } else {
          const double v = number();
          coeff = divide ? coeff / v : coeff * v;
        }
        skip_ws();
        if (pos_ < text_.size() && (text_[pos_] == '*' || text_[pos_] == '/')) {
          divide = text_[pos_] == '/';
          ++pos_;
          continue;
        }
        break;
      }
      (has_t ? omega : phase) += sign * coeff;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

RateFunction RateFunction::parse(std::string_view text) { return RateParser(text).parse(); }

}  // namespace porosplit
