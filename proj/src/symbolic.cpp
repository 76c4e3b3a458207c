#include "gdm/symbolic.hpp"

#include <charconv>
#include <cmath>

#include "gdm/error.hpp"

namespace gdm {

Word::Word(std::vector<int> s, int n) : symbols(std::move(s)), alphabet_size(n) {
  if (n < 2) throw Error(ErrorKind::Domain, "alphabet size must be at least 2");
  for (int sym : symbols) {
    if (sym < 0 || sym >= n) {
      throw Error(ErrorKind::Domain, "symbol " + std::to_string(sym) + " outside [0, " + std::to_string(n - 1) + "]");
    }
  }
}

Word Word::appended(int symbol) const {
  std::vector<int> s = symbols;
  s.push_back(symbol);
  return Word(std::move(s), alphabet_size);
}

Word Word::prefix(std::size_t length) const {
  return Word(std::vector<int>(symbols.begin(), symbols.begin() + static_cast<std::ptrdiff_t>(std::min(length, symbols.size()))),
              alphabet_size);
}

std::string Word::str() const {
  std::string out;
  bool wide = alphabet_size > 10;
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    if (wide && k > 0) out.push_back(',');
    out += std::to_string(symbols[k]);
  }
  return out;
}

Word parse_word(std::string_view text, int alphabet_size) {
  std::vector<int> symbols;
  if (text.find(',') != std::string_view::npos) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find(',', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view piece = text.substr(start, end - start);
      int value = 0;
      auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
      if (ec != std::errc() || ptr != piece.data() + piece.size()) {
        throw Error(ErrorKind::Config, "bad symbol '" + std::string(piece) + "' in word");
      }
      symbols.push_back(value);
      start = end + 1;
    }
  } else {
    for (char ch : text) {
      if (ch < '0' || ch > '9') throw Error(ErrorKind::Config, std::string("bad symbol '") + ch + "' in word");
      symbols.push_back(ch - '0');
    }
  }
  return Word(std::move(symbols), alphabet_size);
}

Rational NadicInterval::left() const {
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(alphabet_size), static_cast<unsigned long>(depth));
  Rational q(numerator, scale);
  q.canonicalize();
  return q;
}

Rational NadicInterval::right() const {
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(alphabet_size), static_cast<unsigned long>(depth));
  Rational q(BigInt(numerator + 1), scale);
  q.canonicalize();
  return q;
}

bool NadicInterval::contains(const NadicInterval& inner) const {
  if (inner.alphabet_size != alphabet_size || inner.depth < depth) return false;
  return inner.left() >= left() && inner.right() <= right();
}

NadicInterval cylinder_interval(const Word& word) {
  NadicInterval out;
  out.alphabet_size = word.alphabet_size;
  out.depth = static_cast<int>(word.size());
  out.numerator = 0;
  for (int sym : word.symbols) out.numerator = out.numerator * word.alphabet_size + sym;
  return out;
}

Rational project(const Word& word) {
  if (word.empty()) throw Error(ErrorKind::Domain, "no point address");
  return cylinder_interval(word).left();
}

double entropy_unchecked(std::span<const double> probs) {
  double s = 0.0;
  for (double p : probs) {
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

double entropy(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Domain, "not a probability vector");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw Error(ErrorKind::Domain, "not a probability vector");
  return entropy_unchecked(probs);
}

IfsGeometry geometry_constants(std::string_view name, int interval_n) {
  IfsGeometry g;
  std::string key(name);
  if (key.rfind("interval", 0) == 0) {
    int n = interval_n;
    if (key.size() > 8) {
      if (key[8] != ':' && key[8] != '(') throw Error(ErrorKind::Config, "unknown geometry '" + key + "'");
      std::string digits = key.substr(9);
      if (!digits.empty() && digits.back() == ')') digits.pop_back();
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        throw Error(ErrorKind::Config, "unknown geometry '" + key + "'");
      }
    }
    if (n < 2) throw Error(ErrorKind::Config, "interval geometry needs N >= 2");
    g.kind = GeometryKind::Interval;
    g.name = "interval(" + std::to_string(n) + ")";
    g.maps = n;
    g.r = 1.0 / n;
    g.c1 = 1.0;
    g.c2 = 1.0;
    g.D = 3;
  } else if (key == "square") {
    g.kind = GeometryKind::Square;
    g.name = key;
    g.maps = 4;
    g.r = 0.5;
    g.c1 = std::sqrt(2.0);
    g.c2 = std::sqrt(2.0);
    g.D = 9;
  } else if (key == "gasket") {
    g.kind = GeometryKind::Gasket;
    g.name = key;
    g.maps = 3;
    g.r = 0.5;
    g.c1 = 1.0;
    g.c2 = 1.0;
    g.D = 6;
  } else if (key == "carpet") {
    g.kind = GeometryKind::Carpet;
    g.name = key;
    g.maps = 8;
    g.r = 1.0 / 3.0;
    g.c1 = std::sqrt(2.0);
    g.c2 = std::sqrt(2.0);
    g.D = 8;
  } else {
    throw Error(ErrorKind::Config, "unknown geometry '" + key + "'");
  }
  return g;
}

}  // namespace gdm
