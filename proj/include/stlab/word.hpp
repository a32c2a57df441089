#pragma once

#include <string>
#include <utility>
#include <vector>

namespace stlab {

// An ordered alphabet of single-character letter names. The order is fixed
// and used everywhere canonical forms are needed.
struct Alphabet {
  std::vector<std::string> letters;

  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> ls);
  static Alphabet of(const std::string& chars);  // e.g. of("xyz")

  int size() const { return static_cast<int>(letters.size()); }
  // Returns the index of a letter name, or -1.
  int index(const std::string& name) const;
  bool operator==(const Alphabet& o) const { return letters == o.letters; }
};

// A freely reduced word: list of (letter index, sign) syllables.
struct Word {
  std::vector<std::pair<int, int>> syl;  // (letter, +1/-1)

  // Parses "xyX" syntax: lowercase = generator, uppercase = its inverse.
  // The result is freely reduced.
  static Word parse(const std::string& text, const Alphabet& a);

  bool empty() const { return syl.empty(); }
  int length() const { return static_cast<int>(syl.size()); }
  Word inverse() const;
  Word operator*(const Word& o) const;  // concatenate and reduce
  Word pow(int k) const;
  std::string str(const Alphabet& a) const;
  bool operator==(const Word& o) const { return syl == o.syl; }
  bool operator<(const Word& o) const;  // ShortLex by (letter, sign)

  void reduce();  // free reduction in place
};

// Cyclically reduces w (conjugation), returning the cyclic core.
Word cyclic_reduce(const Word& w);

// True iff w is a proper power u^k, k >= 2, of some word u.
// w is cyclically reduced first; the empty word is not a power.
bool is_proper_power(const Word& w);

Word commutator(const Word& u, const Word& v);  // u v u^-1 v^-1

}  // namespace stlab
