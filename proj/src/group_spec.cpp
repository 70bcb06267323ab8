#include "commdeg/group_spec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>
#include <vector>

#include "commdeg/error.hpp"

namespace commdeg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::string_view spec, const std::string& why) {
  throw Error(ErrorCode::ParseError, "'" + std::string(spec) + "': " + why);
}

unsigned parse_unsigned(std::string_view text, std::string_view spec) {
  text = trim(text);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    fail(spec, "expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_top_level(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(' || s[i] == '[') ++depth;
    if (s[i] == ')' || s[i] == ']') --depth;
    if (depth == 0 && s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(s.substr(start));
  return parts;
}

GroupPtr parse_factor(std::string_view spec, std::size_t max_order) {
  spec = trim(spec);
  if (spec.empty()) fail(spec, "empty group spec");
  if (spec.starts_with("perm")) {
    auto gens = parse_perm_spec(spec);
    return close_group(gens, max_order, std::string(spec));
  }
  const char family = static_cast<char>(std::toupper(static_cast<unsigned char>(spec.front())));
  if (std::string_view("CDSAQ").find(family) == std::string_view::npos) {
    throw Error(ErrorCode::UnknownFamily, "unknown group family in '" + std::string(spec) + "'");
  }
  return named_group(family, parse_unsigned(spec.substr(1), spec), max_order);
}

std::vector<ElementId> parse_id_list(std::string_view body, std::string_view spec) {
  std::vector<ElementId> ids;
  body = trim(body);
  if (body.empty()) return ids;
  for (auto part : split_top_level(body, ',')) ids.push_back(parse_unsigned(part, spec));
  return ids;
}

}  // namespace

PermList parse_perm_spec(std::string_view spec) {
  const std::string_view original = spec;
  spec = trim(spec);
  if (!spec.starts_with("perm(")) fail(original, "expected perm(<degree>): ...");
  const auto close = spec.find(')');
  if (close == std::string_view::npos) fail(original, "missing ')' after degree");
  PermList gens;
  gens.degree = parse_unsigned(spec.substr(5, close - 5), original);
  if (gens.degree == 0) fail(original, "degree must be positive");
  std::string_view rest = trim(spec.substr(close + 1));
  if (!rest.starts_with(':')) fail(original, "expected ':' after degree");
  rest = trim(rest.substr(1));
  if (rest.empty()) return gens;

  for (auto gen_text : split_top_level(rest, ';')) {
    gen_text = trim(gen_text);
    std::vector<std::uint32_t> image(gens.degree);
    for (std::uint32_t i = 0; i < gens.degree; ++i) image[i] = i;
    std::vector<bool> used(gens.degree, false);
    std::size_t pos = 0;
    while (pos < gen_text.size()) {
      if (std::isspace(static_cast<unsigned char>(gen_text[pos]))) {
        ++pos;
        continue;
      }
      if (gen_text[pos] != '(') fail(original, "expected '(' to open a cycle");
      const auto end = gen_text.find(')', pos);
      if (end == std::string_view::npos) fail(original, "unterminated cycle");
      std::string body(gen_text.substr(pos + 1, end - pos - 1));
      std::replace(body.begin(), body.end(), ',', ' ');
      std::vector<std::uint32_t> cycle;
      std::size_t i = 0;
      while (i < body.size()) {
        while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        std::size_t j = i;
        while (j < body.size() && !std::isspace(static_cast<unsigned char>(body[j]))) ++j;
        if (j > i) {
          const unsigned point = parse_unsigned(std::string_view(body).substr(i, j - i), original);
          if (point == 0 || point > gens.degree) {
            throw Error(ErrorCode::InvalidPermutation,
                        "point " + std::to_string(point) + " outside 1.." +
                            std::to_string(gens.degree));
          }
          cycle.push_back(point - 1);
        }
        i = j;
      }
      for (std::size_t c = 0; c < cycle.size(); ++c) {
        if (used[cycle[c]]) {
          throw Error(ErrorCode::InvalidPermutation, "point repeated across cycles in '" +
                                                         std::string(gen_text) + "'");
        }
        used[cycle[c]] = true;
        image[cycle[c]] = cycle[(c + 1) % cycle.size()];
      }
      pos = end + 1;
    }
    gens.perms.push_back(std::move(image));
  }
  validate(gens);
  return gens;
}

GroupPtr parse_group_spec(std::string_view spec, std::size_t max_order) {
  auto factors = split_top_level(trim(spec), 'x');
  GroupPtr result = parse_factor(factors.front(), max_order);
  for (std::size_t i = 1; i < factors.size(); ++i) {
    result = direct_product(result, parse_factor(factors[i], max_order), max_order).group;
  }
  return result;
}

SubgroupRef parse_subgroup_spec(const GroupPtr& g, std::string_view spec) {
  const std::string_view original = spec;
  spec = trim(spec);
  if (spec == "triv") return trivial_subgroup(g);
  if (spec == "full") return full_subgroup(g);
  if (spec == "center") return center(g);
  auto bracketed = [&](std::string_view prefix) -> std::optional<std::vector<ElementId>> {
    if (!spec.starts_with(prefix)) return std::nullopt;
    if (!spec.ends_with(']')) fail(original, "expected closing ']'");
    return parse_id_list(spec.substr(prefix.size(), spec.size() - prefix.size() - 1), original);
  };
  if (auto ids = bracketed("gen[")) {
    for (auto id : *ids) {
      if (id >= g->order()) {
        throw Error(ErrorCode::InvalidArgument,
                    "element id " + std::to_string(id) + " out of range for " + g->name());
      }
    }
    return subgroup_closure(g, *ids, std::string(spec));
  }
  if (auto ids = bracketed("members[")) {
    for (auto id : *ids) {
      if (id >= g->order()) throw Error(ErrorCode::InvalidArgument, "element id out of range");
    }
    return SubgroupRef::from_members(g, std::move(*ids));
  }
  fail(original, "expected gen[...], members[...], triv, full or center");
}

}  // namespace commdeg
