#pragma once

// Finite labelled chains (words over label sets) and their text format:
//   [., P1, P1+P2]
// Marked words add a '*' suffix to marked letters.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chainrep/error.hpp"
#include "chainrep/formula.hpp"

namespace chainrep {

// A label set as a bitmask over the signature's predicates.
using Label = std::uint32_t;

struct Word {
  std::vector<Label> letters;

  std::size_t size() const noexcept { return letters.size(); }
  bool empty() const noexcept { return letters.empty(); }
  Label operator[](std::size_t i) const { return letters[i]; }

  Word& operator+=(const Word& other) {
    letters.insert(letters.end(), other.letters.begin(), other.letters.end());
    return *this;
  }
  friend Word operator+(Word a, const Word& b) { return a += b; }
  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;
};

inline Word repeat(const Word& w, std::size_t times) {
  Word out;
  for (std::size_t i = 0; i < times; ++i) out += w;
  return out;
}

struct MarkedLetter {
  Label label = 0;
  bool mark = false;
  friend bool operator==(const MarkedLetter&, const MarkedLetter&) = default;
};

using MarkedWord = std::vector<MarkedLetter>;

// Letter index in the marked alphabet of a signature with k predicates.
inline std::size_t letter_index(MarkedLetter l, std::size_t k) {
  return static_cast<std::size_t>(l.label) | (static_cast<std::size_t>(l.mark) << k);
}
inline MarkedLetter letter_at(std::size_t index, std::size_t k) {
  return {static_cast<Label>(index & ((std::size_t{1} << k) - 1)), ((index >> k) & 1U) != 0};
}

// Marks the given (strictly ascending) positions.
inline MarkedWord mark_positions(const Word& w, const std::vector<std::size_t>& positions) {
  MarkedWord out;
  out.reserve(w.size());
  for (auto l : w.letters) out.push_back({l, false});
  for (auto p : positions) {
    if (p >= out.size()) throw PreconditionError("mark_positions: position out of range");
    out[p].mark = true;
  }
  return out;
}

inline std::string render_label(Label l, const Signature& sig) {
  if (l == 0) return ".";
  std::string out;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (!((l >> i) & 1U)) continue;
    if (!out.empty()) out += '+';
    out += sig.predicates[i];
  }
  return out;
}

inline std::string render_letter(MarkedLetter l, const Signature& sig) {
  return render_label(l.label, sig) + (l.mark ? "*" : "");
}

inline std::string render_word(const Word& w, const Signature& sig) {
  std::string out = "[";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ", ";
    out += render_label(w[i], sig);
  }
  return out + "]";
}

inline std::string render_marked_word(const MarkedWord& w, const Signature& sig) {
  std::string out = "[";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ", ";
    out += render_letter(w[i], sig);
  }
  return out + "]";
}

namespace detail {
inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}
}  // namespace detail

inline MarkedLetter parse_letter(std::string_view text, const Signature& sig) {
  std::string t = detail::trim(text);
  MarkedLetter out;
  if (!t.empty() && t.back() == '*') {
    out.mark = true;
    t.pop_back();
    t = detail::trim(t);
  }
  if (t == ".") return out;
  if (t.empty()) throw InputError("empty letter");
  std::size_t start = 0;
  while (start <= t.size()) {
    std::size_t plus = t.find('+', start);
    std::string name = detail::trim(std::string_view(t).substr(start, plus == std::string::npos ? std::string::npos : plus - start));
    std::size_t idx = sig.index_of(name);
    if (idx >= sig.size()) throw InputError("unknown predicate in letter: '" + name + "'");
    out.label |= Label{1} << idx;
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  return out;
}

inline MarkedWord parse_marked_word(std::string_view text, const Signature& sig) {
  std::string t = detail::trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') throw InputError("word must be enclosed in [ ]");
  std::string body = detail::trim(std::string_view(t).substr(1, t.size() - 2));
  MarkedWord out;
  if (body.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = body.find(',', start);
    out.push_back(parse_letter(std::string_view(body).substr(start, comma == std::string::npos ? std::string::npos : comma - start), sig));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline Word parse_word(std::string_view text, const Signature& sig) {
  Word out;
  for (const auto& l : parse_marked_word(text, sig)) {
    if (l.mark) throw InputError("unexpected mark in unmarked word");
    out.letters.push_back(l.label);
  }
  return out;
}

inline Word underlying(const MarkedWord& w) {
  Word out;
  for (const auto& l : w) out.letters.push_back(l.label);
  return out;
}

}  // namespace chainrep
