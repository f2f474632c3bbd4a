#include "core/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace fhm {

std::optional<Rat> parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) return std::nullopt;

  auto is_int = [](const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };

  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) return std::nullopt;
    Rat q;
    if (q.set_str(num + "/" + den, 10) != 0) return std::nullopt;
    if (q.get_den() == 0) return std::nullopt;
    q.canonicalize();
    return q;
  }

  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string head = s.substr(0, dot), frac = s.substr(dot + 1);
    if (head.empty() || head == "-" || head == "+") head += "0";
    if (!is_int(head)) return std::nullopt;
    if (frac.empty()) frac = "0";
    for (char c : frac)
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    Rat whole;
    if (whole.set_str(head, 10) != 0) return std::nullopt;
    mpz_class num(frac, 10), den(1);
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    Rat tail(num, den);
    tail.canonicalize();
    Rat q = whole;
    if (s[0] == '-')
      q -= tail;
    else
      q += tail;
    return q;
  }

  if (!is_int(s)) return std::nullopt;
  Rat q;
  if (q.set_str(s, 10) != 0) return std::nullopt;
  return q;
}

std::string rational_to_string(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rat mod_one(const Rat& q) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return q - Rat(fl);
}

std::string double_to_string(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace fhm
