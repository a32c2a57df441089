#include "stlab/word.hpp"

#include <algorithm>
#include <cctype>

#include "stlab/errors.hpp"

namespace stlab {

Alphabet::Alphabet(std::vector<std::string> ls) : letters(std::move(ls)) {
  if (letters.empty()) throw precondition_error("alphabet must be non-empty");
  for (size_t i = 0; i < letters.size(); ++i)
    for (size_t j = i + 1; j < letters.size(); ++j)
      if (letters[i] == letters[j]) throw precondition_error("duplicate letter name");
}

Alphabet Alphabet::of(const std::string& chars) {
  std::vector<std::string> ls;
  for (char c : chars) ls.push_back(std::string(1, c));
  return Alphabet(ls);
}

int Alphabet::index(const std::string& name) const {
  for (size_t i = 0; i < letters.size(); ++i)
    if (letters[i] == name) return static_cast<int>(i);
  return -1;
}

void Word::reduce() {
  std::vector<std::pair<int, int>> out;
  for (auto& s : syl) {
    if (!out.empty() && out.back().first == s.first && out.back().second == -s.second)
      out.pop_back();
    else
      out.push_back(s);
  }
  syl = std::move(out);
}

Word Word::parse(const std::string& text, const Alphabet& a) {
  Word w;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    int sign = std::isupper(static_cast<unsigned char>(c)) ? -1 : +1;
    std::string name(1, static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    int idx = a.index(name);
    if (idx < 0) throw precondition_error(std::string("unknown letter: ") + c);
    w.syl.emplace_back(idx, sign);
  }
  w.reduce();
  return w;
}

Word Word::inverse() const {
  Word w;
  for (auto it = syl.rbegin(); it != syl.rend(); ++it)
    w.syl.emplace_back(it->first, -it->second);
  return w;
}

Word Word::operator*(const Word& o) const {
  Word w = *this;
  w.syl.insert(w.syl.end(), o.syl.begin(), o.syl.end());
  w.reduce();
  return w;
}

Word Word::pow(int k) const {
  Word base = k < 0 ? inverse() : *this;
  int n = k < 0 ? -k : k;
  Word r;
  for (int i = 0; i < n; ++i) r = r * base;
  return r;
}

std::string Word::str(const Alphabet& a) const {
  std::string s;
  for (auto& [l, sign] : syl) {
    char c = a.letters[l][0];
    s += sign > 0 ? c : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return s;
}

bool Word::operator<(const Word& o) const {
  if (syl.size() != o.syl.size()) return syl.size() < o.syl.size();
  return syl < o.syl;
}

Word cyclic_reduce(const Word& w) {
  Word r = w;
  while (r.syl.size() >= 2 && r.syl.front().first == r.syl.back().first &&
         r.syl.front().second == -r.syl.back().second) {
    r.syl.erase(r.syl.begin());
    r.syl.pop_back();
  }
  return r;
}

bool is_proper_power(const Word& w) {
  Word c = cyclic_reduce(w);
  int n = c.length();
  if (n == 0) return false;
  for (int p = 1; p <= n / 2; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (int i = p; i < n && ok; ++i) ok = c.syl[i] == c.syl[i - p];
    if (ok) return true;
  }
  return false;
}

Word commutator(const Word& u, const Word& v) { return u * v * u.inverse() * v.inverse(); }

}  // namespace stlab
