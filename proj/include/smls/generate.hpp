#pragma once

// Random instance generators and the plain-text instance format.
//
// File format:
//     SM 3            (or "SMTI 3")
//     1: 2 1 3        men's lists, one line per man, in id order
//     2: (1 2) 3      a parenthesized group is a tie
//     3: 3 1 2
//     1: 1 2 3        then women's lists
//     ...
// Entries missing from a line are unacceptable. Lines starting with '#' and
// blank lines are ignored.
//
// RNG draw order (see rng.hpp for the generator itself):
//   1. men's lists 1..n, then women's lists 1..n, each a Fisher-Yates shuffle
//      of the identity 1..n;
//   2. (SMTI) one deletion coin per entry, walking men 1..n and each man's
//      step-1 list in order; entries already deleted still consume a coin;
//   3. (SMTI) if some list is empty, the instance is discarded and the stream
//      continues with step 1;
//   4. (SMTI) one tie coin per list position j >= 2, men 1..n then women 1..n.

#include <cctype>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "smls/model.hpp"
#include "smls/rng.hpp"

namespace smls {

struct GenParams {
  int n = 10;
  double p1 = 0.0;  // deletion probability, [0, 1)
  double p2 = 0.0;  // tie probability, [0, 1]
  std::uint64_t seed = 0;
  int max_retries = 1000;
};

namespace detail {

inline std::vector<std::vector<Id>> random_permutations(int n, Rng& rng) {
  std::vector<std::vector<Id>> out(static_cast<std::size_t>(n));
  for (auto& perm : out) {
    perm.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[i] = i + 1;
    rng.shuffle(perm);
  }
  return out;
}

// Step 4: walk positions, copying the previous rank with probability p2.
inline RawList tie_groups(const std::vector<Id>& ordered, double p2, Rng& rng) {
  RawList out;
  for (std::size_t j = 0; j < ordered.size(); ++j) {
    if (j > 0 && rng.bernoulli(p2)) out.back().push_back(ordered[j]);
    else out.push_back({ordered[j]});
  }
  return out;
}

}  // namespace detail

/// Impartial culture: every list an independent uniform permutation.
inline Instance gen_sm_ic(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "size must be positive");
  Rng rng(seed);
  auto men = detail::random_permutations(n, rng);
  auto women = detail::random_permutations(n, rng);
  return build_instance(n, strict_lists(men), strict_lists(women), Mode::StrictComplete);
}

inline Instance gen_smti(const GenParams& params) {
  const int n = params.n;
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "size must be positive");
  if (!(params.p1 >= 0.0 && params.p1 < 1.0))
    throw Error(ErrorKind::InvalidArgument, "p1 must lie in [0, 1)");
  if (!(params.p2 >= 0.0 && params.p2 <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "p2 must lie in [0, 1]");
  if (params.max_retries < 1) throw Error(ErrorKind::InvalidArgument, "max_retries must be positive");

  Rng rng(params.seed);
  const auto un = static_cast<std::size_t>(n);
  for (int discarded = 0;; ++discarded) {
    if (discarded >= params.max_retries)
      throw Error(ErrorKind::RetriesExhausted,
                  std::to_string(discarded) + " instances discarded with an empty list (n=" +
                      std::to_string(n) + ", p1=" + std::to_string(params.p1) + ")");
    const auto men = detail::random_permutations(n, rng);
    const auto women = detail::random_permutations(n, rng);

    std::vector<char> deleted(un * un, 0);  // [m-1][w-1]
    for (std::size_t m = 0; m < un; ++m)
      for (Id w : men[m])
        if (rng.bernoulli(params.p1)) deleted[m * un + static_cast<std::size_t>(w - 1)] = 1;

    auto kept = [&](const std::vector<std::vector<Id>>& lists, bool of_men) {
      std::vector<std::vector<Id>> out(un);
      for (std::size_t p = 0; p < un; ++p)
        for (Id o : lists[p]) {
          const std::size_t cell = of_men ? p * un + static_cast<std::size_t>(o - 1)
                                          : static_cast<std::size_t>(o - 1) * un + p;
          if (!deleted[cell]) out[p].push_back(o);
        }
      return out;
    };
    const auto men_kept = kept(men, true);
    const auto women_kept = kept(women, false);

    bool empty = false;
    for (std::size_t p = 0; p < un; ++p) empty = empty || men_kept[p].empty() || women_kept[p].empty();
    if (empty) continue;

    std::vector<RawList> men_raw, women_raw;
    men_raw.reserve(un);
    women_raw.reserve(un);
    for (const auto& l : men_kept) men_raw.push_back(detail::tie_groups(l, params.p2, rng));
    for (const auto& l : women_kept) women_raw.push_back(detail::tie_groups(l, params.p2, rng));
    return build_instance(n, men_raw, women_raw, Mode::Smti);
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool parse_int(std::string_view s, long long& out) {
  if (s.empty() || s.size() > 12) return false;
  out = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    out = out * 10 + (c - '0');
  }
  return true;
}

inline RawList parse_list_body(std::string_view body, int line) {
  RawList out;
  bool in_group = false;
  std::size_t i = 0;
  while (i < body.size()) {
    const char c = body[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(') {
      if (in_group) throw Error(ErrorKind::SyntaxError, "nested tie group", line);
      in_group = true;
      out.emplace_back();
      ++i;
    } else if (c == ')') {
      if (!in_group) throw Error(ErrorKind::SyntaxError, "unmatched ')'", line);
      if (out.back().empty()) throw Error(ErrorKind::SyntaxError, "empty tie group", line);
      in_group = false;
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < body.size() && std::isdigit(static_cast<unsigned char>(body[j]))) ++j;
      long long v = 0;
      if (!parse_int(body.substr(i, j - i), v)) throw Error(ErrorKind::SyntaxError, "bad number", line);
      if (in_group) out.back().push_back(static_cast<Id>(v));
      else out.push_back({static_cast<Id>(v)});
      i = j;
    } else {
      throw Error(ErrorKind::SyntaxError, std::string("unexpected character '") + c + "'", line);
    }
  }
  if (in_group) throw Error(ErrorKind::SyntaxError, "unclosed tie group", line);
  return out;
}

}  // namespace detail

inline Instance parse_instance(std::string_view text, BuildOptions options = {}) {
  std::vector<std::pair<int, std::string_view>> lines;
  {
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
      ++lineno;
      const auto line = detail::trim(text.substr(pos, end - pos));
      if (!line.empty() && line.front() != '#') lines.emplace_back(lineno, line);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
  }
  if (lines.empty()) throw Error(ErrorKind::SyntaxError, "missing header", 1);

  const auto [header_line, header] = lines.front();
  Mode mode;
  std::string_view rest;
  if (header.substr(0, 5) == "SMTI " || header.substr(0, 5) == "SMTI\t") {
    mode = Mode::Smti;
    rest = header.substr(5);
  } else if (header.substr(0, 3) == "SM " || header.substr(0, 3) == "SM\t") {
    mode = Mode::StrictComplete;
    rest = header.substr(3);
  } else {
    throw Error(ErrorKind::SyntaxError, "header must be 'SM n' or 'SMTI n'", header_line);
  }
  long long n = 0;
  if (!detail::parse_int(detail::trim(rest), n) || n < 1 || n > 1000000)
    throw Error(ErrorKind::SyntaxError, "bad problem size", header_line);

  const std::size_t expected = 1 + 2 * static_cast<std::size_t>(n);
  if (lines.size() < expected)
    throw Error(ErrorKind::SyntaxError, "unexpected end of input: expected " + std::to_string(2 * n) + " lists",
                lines.back().first);
  if (lines.size() > expected)
    throw Error(ErrorKind::SyntaxError, "trailing content after the women's lists", lines[expected].first);

  std::vector<RawList> men, women;
  for (std::size_t k = 1; k < expected; ++k) {
    const auto [lineno, line] = lines[k];
    const long long want = static_cast<long long>((k - 1) % static_cast<std::size_t>(n)) + 1;
    const auto colon = line.find(':');
    long long id = 0;
    if (colon == std::string_view::npos || !detail::parse_int(detail::trim(line.substr(0, colon)), id))
      throw Error(ErrorKind::SyntaxError, "expected '<id>: <list>'", lineno);
    if (id != want)
      throw Error(ErrorKind::SyntaxError, "expected list of person " + std::to_string(want) + ", got " +
                                              std::to_string(id), lineno);
    auto list = detail::parse_list_body(line.substr(colon + 1), lineno);
    (k <= static_cast<std::size_t>(n) ? men : women).push_back(std::move(list));
  }
  return build_instance(static_cast<int>(n), men, women, mode, options);
}

inline std::string serialize_list(const RawList& list) {
  std::string out;
  for (const auto& group : list) {
    if (!out.empty()) out += ' ';
    if (group.size() == 1) {
      out += std::to_string(group.front());
      continue;
    }
    out += '(';
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(group[i]);
    }
    out += ')';
  }
  return out;
}

inline std::string serialize_instance(const Instance& inst) {
  std::ostringstream os;
  os << to_string(inst.mode()) << ' ' << inst.n() << '\n';
  for (Gender g : {Gender::Men, Gender::Women})
    for (Id p = 1; p <= inst.n(); ++p) os << p << ": " << serialize_list(inst.raw_list(g, p)) << '\n';
  return os.str();
}

}  // namespace smls
