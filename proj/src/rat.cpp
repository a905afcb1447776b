#include "ergocap/rat.hpp"

#include <stdexcept>

namespace ergocap {

Rat rat(long num, long den) {
  if (den == 0) throw std::invalid_argument("rat: zero denominator");
  Rat q(num, den);
  q.canonicalize();
  return q;
}

Rat rat_parse(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("rat_parse: empty string");
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    // decimal literal: digits.digits -> (digits digits)/10^k
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac_len = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
      throw std::invalid_argument("rat_parse: bad decimal '" + s + "'");
    mpz_class num;
    if (mpz_set_str(num.get_mpz_t(), digits.c_str(), 10) != 0)
      throw std::invalid_argument("rat_parse: bad decimal '" + s + "'");
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac_len));
    Rat q(num, den);
    q.canonicalize();
    return q;
  }
  Rat q;
  if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0 || mpz_sgn(mpq_denref(q.get_mpq_t())) == 0)
    throw std::invalid_argument("rat_parse: bad rational '" + s + "'");
  q.canonicalize();
  return q;
}

std::string rat_str(const Rat& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double rat_double(const Rat& q) { return q.get_d(); }

Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

Rat rat_pow(const Rat& q, unsigned k) {
  Rat out(1);
  Rat base = q;
  while (k > 0) {
    if (k & 1u) out *= base;
    base *= base;
    k >>= 1u;
  }
  return out;
}

}  // namespace ergocap
