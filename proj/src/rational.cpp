#include "memint/rational.hpp"

#include <stdexcept>

namespace memint {

double to_double(const Rational& r) { return r.template convert_to<double>(); }

std::string rational_to_string(const Rational& r) {
  const Int num = boost::multiprecision::numerator(r);
  const Int den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational parse_rational(std::string_view text, const std::string& what) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument(what + ": expected a rational like \"p\" or \"p/q\", got \"" +
                                std::string(text) + "\"");
  };
  if (text.empty()) return fail();
  size_t pos = 0;
  auto read_int = [&]() -> Int {
    bool neg = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
      neg = text[pos] == '-';
      ++pos;
    }
    size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) fail();
    Int v(std::string(text.substr(start, pos - start)));
    return neg ? Int(-v) : v;
  };
  Int num = read_int();
  Int den = 1;
  if (pos < text.size()) {
    if (text[pos] != '/') fail();
    ++pos;
    den = read_int();
    if (pos != text.size()) fail();
    if (den == 0) throw std::invalid_argument(what + ": zero denominator in \"" + std::string(text) + "\"");
  }
  return Rational(num, den);
}

std::string ExactScalar::str() const {
  if (is_real()) return rational_to_string(re_);
  std::string im_part;
  if (im_ == 1) {
    im_part = "i";
  } else if (im_ == -1) {
    im_part = "-i";
  } else {
    im_part = rational_to_string(im_) + " i";
  }
  if (re_.is_zero()) return im_part;
  if (im_ > 0) return rational_to_string(re_) + " + " + (im_ == 1 ? "i" : rational_to_string(im_) + " i");
  Rational neg = -im_;
  return rational_to_string(re_) + " - " + (neg == 1 ? "i" : rational_to_string(neg) + " i");
}

}  // namespace memint
