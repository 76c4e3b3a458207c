#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gdm/rational.hpp"

namespace gdm {

/// Finite word over {0,...,N-1}. The empty word addresses the whole space.
struct Word {
  std::vector<int> symbols;
  int alphabet_size = 2;

  Word() = default;
  Word(std::vector<int> s, int n);

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  int operator[](std::size_t k) const { return symbols[k]; }

  Word appended(int symbol) const;
  Word prefix(std::size_t length) const;
  std::string str() const;

  friend bool operator==(const Word&, const Word&) = default;
};

/// Parses digits "0120" (N <= 10) or comma separated symbols "0,11,3".
Word parse_word(std::string_view text, int alphabet_size);

/// [numerator / N^depth, (numerator + 1) / N^depth)
struct NadicInterval {
  BigInt numerator;
  int depth = 0;
  int alphabet_size = 2;

  Rational left() const;
  Rational right() const;
  bool contains(const NadicInterval& inner) const;
};

Rational project(const Word& word);
NadicInterval cylinder_interval(const Word& word);

/// Natural-log Shannon entropy with 0 log 0 = 0.
double entropy(std::span<const double> probs);

/// Entropy without the probability-vector check; callers guarantee validity.
double entropy_unchecked(std::span<const double> probs);

enum class GeometryKind { Interval, Square, Gasket, Carpet };

struct IfsGeometry {
  GeometryKind kind = GeometryKind::Interval;
  std::string name;
  int maps = 2;      // number of contractions (N)
  double r = 0.5;    // contraction ratio
  double c1 = 1.0;   // diam(K)
  double c2 = 1.0;   // covering constant, carried but unused numerically
  int D = 3;         // ball overlap bound
};

/// "interval", "interval:N", "square", "gasket", "carpet".
IfsGeometry geometry_constants(std::string_view name, int interval_n = 2);

}  // namespace gdm
