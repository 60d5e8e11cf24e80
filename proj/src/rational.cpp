#include "dwc/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace dwc {

GaussianRational::GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

GaussianRational GaussianRational::fraction(long num, long den, long im_num, long im_den) {
  if (den == 0 || im_den == 0) throw std::invalid_argument("zero denominator");
  return {mpq_class(num, den), mpq_class(im_num, im_den)};
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  const mpq_class d = o.norm2();
  if (sgn(d) == 0) throw std::domain_error("division by zero Gaussian rational");
  mpq_class re = (re_ * o.re_ + im_ * o.im_) / d;
  mpq_class im = (im_ * o.re_ - re_ * o.im_) / d;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

std::string GaussianRational::to_string() const {
  if (is_real()) return format_rational(re_);
  if (sgn(re_) == 0) return format_rational(im_) + "i";
  std::string im = format_rational(im_);
  if (im.front() != '-') im = "+" + im;
  return "(" + format_rational(re_) + im + "i)";
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

mpq_class parse_rational(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string_view num = s;
  std::string_view den = "1";
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    num = s.substr(0, slash);
    den = s.substr(slash + 1);
  }
  if (!all_digits(num) || !all_digits(den))
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  mpz_class n(std::string(num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  mpq_class q(negative ? mpz_class(-n) : n, d);
  q.canonicalize();
  return q;
}

std::string format_rational(const mpq_class& q) { return q.get_str(10); }

}  // namespace dwc
