// token_detail.hpp
//
// Shared helpers for the structured-text token grammar used by model and
// kernel serialization and by config files: name, name{key=value,...}, or a
// wrapper name{<inner token>}. Internal to the library sources.

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "utail/errors.hpp"

namespace utail::detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

struct BracedToken {
  std::string name;
  std::string body;  // inside the braces, untrimmed of commas
  bool has_braces = false;
};

inline BracedToken split_braced(std::string_view token, const std::string& ctx) {
  token = trim(token);
  BracedToken out;
  auto brace = token.find('{');
  if (brace == std::string_view::npos) {
    out.name = std::string(trim(token));
    return out;
  }
  if (token.back() != '}') {
    throw_config(ctx + ": unbalanced braces in token '" + std::string(token) +
                 "'");
  }
  out.name = std::string(trim(token.substr(0, brace)));
  out.body = std::string(token.substr(brace + 1, token.size() - brace - 2));
  out.has_braces = true;
  // Validate nesting depth never goes negative and ends balanced.
  int depth = 0;
  for (char c : out.body) {
    if (c == '{') ++depth;
    if (c == '}') --depth;
    if (depth < 0) {
      throw_config(ctx + ": unbalanced braces in token '" +
                   std::string(token) + "'");
    }
  }
  if (depth != 0) {
    throw_config(ctx + ": unbalanced braces in token '" + std::string(token) +
                 "'");
  }
  return out;
}

// Split "k1=v1,k2=v2" at depth zero.
inline std::vector<std::pair<std::string, std::string>> split_kv(
    std::string_view body, const std::string& ctx) {
  std::vector<std::pair<std::string, std::string>> out;
  int depth = 0;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    std::string_view item = trim(body.substr(start, end - start));
    if (item.empty()) return;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw_config(ctx + ": expected key=value, got '" + std::string(item) +
                   "'");
    }
    out.emplace_back(std::string(trim(item.substr(0, eq))),
                     std::string(trim(item.substr(eq + 1))));
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '{') ++depth;
    if (c == '}') --depth;
    if (c == ',' && depth == 0) {
      flush(i);
      start = i + 1;
    }
  }
  flush(body.size());
  return out;
}

inline double parse_double_exact(std::string_view text, const std::string& ctx) {
  text = trim(text);
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw_config(ctx + ": '" + std::string(text) +
                 "' is not a decimal literal");
  }
  return value;
}

inline long long parse_int_exact(std::string_view text, const std::string& ctx) {
  text = trim(text);
  long long value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw_config(ctx + ": '" + std::string(text) +
                 "' is not an integer literal");
  }
  return value;
}

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t prev = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t cur = row[j];
      std::size_t cost = (a[i - 1] == b[j - 1]) ? 0 : 1;
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, prev + cost});
      prev = cur;
    }
  }
  return row[b.size()];
}

// Candidates within edit distance <= 2 (or sharing a prefix), best first.
inline std::vector<std::string> suggest(std::string_view got,
                                        const std::vector<std::string>& known) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& k : known) {
    std::size_t d = levenshtein(got, k);
    bool prefix = k.rfind(got, 0) == 0 && !got.empty();
    if (d <= 2 || prefix) scored.emplace_back(prefix ? 0 : d, k);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> out;
  for (auto& [d, k] : scored) out.push_back(std::move(k));
  return out;
}

inline std::string with_suggestions(const std::string& msg,
                                    std::string_view got,
                                    const std::vector<std::string>& known) {
  auto s = suggest(got, known);
  if (s.empty()) return msg;
  std::string out = msg + " (did you mean ";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += i + 1 == s.size() ? " or " : ", ";
    out += "'" + s[i] + "'";
  }
  out += "?)";
  return out;
}

}  // namespace utail::detail
