#include "gdm/rational.hpp"

#include <cctype>
#include <cmath>

#include "gdm/error.hpp"

namespace gdm {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

namespace {

BigInt pow10(long exponent) {
  BigInt result;
  mpz_ui_pow_ui(result.get_mpz_t(), 10, static_cast<unsigned long>(exponent));
  return result;
}

Rational parse_decimal(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < text.size(); ++pos) {
    char ch = text[pos];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits.push_back(ch);
      any_digit = true;
      if (seen_point) ++scale;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw Error(ErrorKind::Config, "not a number: '" + std::string(text) + "'");
  long exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    std::string exp_text(text.substr(pos));
    if (exp_text.empty()) throw Error(ErrorKind::Config, "bad exponent in '" + std::string(text) + "'");
    std::size_t used = 0;
    try {
      exponent = std::stol(exp_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != exp_text.size()) throw Error(ErrorKind::Config, "bad exponent in '" + std::string(text) + "'");
    pos = text.size();
  }
  if (pos != text.size()) throw Error(ErrorKind::Config, "trailing characters in '" + std::string(text) + "'");
  BigInt numerator(digits, 10);
  long shift = exponent - scale;
  Rational result;
  if (shift >= 0) {
    result = Rational(numerator * pow10(shift));
  } else {
    result = Rational(numerator, pow10(-shift));
  }
  result.canonicalize();
  return negative ? Rational(-result) : result;
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  return text;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  text = trim(text);
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  Rational numerator = parse_decimal(trim(text.substr(0, slash)));
  Rational denominator = parse_decimal(trim(text.substr(slash + 1)));
  if (denominator == 0) throw Error(ErrorKind::Config, "zero denominator in '" + std::string(text) + "'");
  Rational result = numerator / denominator;
  result.canonicalize();
  return result;
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_str();
}

Rational from_double(double value) {
  if (!std::isfinite(value)) throw Error(ErrorKind::Domain, "cannot convert a non-finite double to a rational");
  Rational result;
  mpq_set_d(result.get_mpq_t(), value);
  return result;
}

std::size_t bit_size(const Rational& value) {
  return mpz_sizeinbase(value.get_num().get_mpz_t(), 2) + mpz_sizeinbase(value.get_den().get_mpz_t(), 2);
}

bool exact_sqrt(const Rational& value, Rational& root) {
  if (value < 0) return false;
  const BigInt& num = value.get_num();
  const BigInt& den = value.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return false;
  BigInt num_root, den_root;
  mpz_sqrt(num_root.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(den_root.get_mpz_t(), den.get_mpz_t());
  root = Rational(num_root, den_root);
  root.canonicalize();
  return true;
}

}  // namespace gdm
