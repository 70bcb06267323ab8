#include "commdeg/serialize.hpp"

#include <sstream>

#include "commdeg/error.hpp"
#include "commdeg/group_spec.hpp"

namespace commdeg {

Method parse_method(const std::string& name) {
  for (auto m : {Method::Brute, Method::ClassFormula, Method::Distribution, Method::Character}) {
    if (method_name(m) == name) return m;
  }
  throw Error(ErrorCode::ParseError, "unknown method '" + name + "'");
}

Json to_json(const ExactProb& p) {
  Json j;
  j["group"] = p.params.group().name();
  j["H"] = p.params.H.label();
  j["K"] = p.params.K.label();
  j["n"] = p.params.n;
  j["m"] = p.params.m;
  j["g"] = p.params.g;
  j["method"] = std::string(method_name(p.method));
  j["value"] = {{"num", p.numerator().str()}, {"den", p.denominator().str()}};
  return j;
}

ExactProb exact_prob_from_json(const Json& j, std::size_t max_order) {
  try {
    auto group = parse_group_spec(j.at("group").get<std::string>(), max_order);
    CommParams params{parse_subgroup_spec(group, j.at("H").get<std::string>()),
                      parse_subgroup_spec(group, j.at("K").get<std::string>()),
                      j.at("n").get<unsigned>(), j.at("m").get<unsigned>(),
                      j.at("g").get<ElementId>()};
    params.validate();
    const auto& v = j.at("value");
    Rational value(BigInt(v.at("num").get<std::string>()), BigInt(v.at("den").get<std::string>()));
    return ExactProb{value, parse_method(j.at("method").get<std::string>()), params};
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed probability JSON: ") + e.what());
  }
}

std::string to_csv(const CommDistribution& d) {
  std::ostringstream out;
  out << "element_id,count\n";
  for (std::size_t i = 0; i < d.counts.size(); ++i) out << i << ',' << d.counts[i] << '\n';
  return out.str();
}

Json to_json(const CharacterTable& t) {
  Json j;
  j["order"] = t.group->order();
  Json classes = Json::array();
  for (std::size_t k = 0; k < t.num_classes(); ++k) {
    classes.push_back({{"size", t.class_sizes[k]}, {"rep", t.class_reps[k]}});
  }
  j["classes"] = std::move(classes);
  Json irr = Json::array();
  for (std::size_t i = 0; i < t.irreducibles.size(); ++i) {
    Json values = Json::array();
    for (const auto& v : t.irreducibles[i].values) values.push_back({v.real(), v.imag()});
    irr.push_back({{"degree", t.degrees[i]}, {"values", std::move(values)}});
  }
  j["irreducibles"] = std::move(irr);
  return j;
}

CharacterTable character_table_from_json(const GroupPtr& g, const Json& j) {
  CharacterTable skel = class_skeleton(g);
  CharacterTable t;
  t.group = g;
  t.class_of.assign(g->order(), 0);
  try {
    if (j.at("order").get<std::size_t>() != g->order()) {
      throw Error(ErrorCode::InvalidArgument, "table order does not match " + g->name());
    }
    const auto& classes = j.at("classes");
    if (classes.size() != skel.num_classes()) {
      throw Error(ErrorCode::InvalidArgument, "class count does not match " + g->name());
    }
    std::vector<bool> used(skel.num_classes(), false);
    for (std::size_t k = 0; k < classes.size(); ++k) {
      const auto rep = classes[k].at("rep").get<ElementId>();
      if (rep >= g->order()) throw Error(ErrorCode::InvalidArgument, "class rep out of range");
      const std::size_t src = skel.class_of[rep];
      if (used[src] || classes[k].at("size").get<std::size_t>() != skel.class_sizes[src]) {
        throw Error(ErrorCode::InvalidArgument, "class " + std::to_string(k) +
                                                    " does not match a conjugacy class");
      }
      used[src] = true;
      for (auto x : skel.classes[src]) t.class_of[x] = k;
      t.classes.push_back(skel.classes[src]);
      t.class_sizes.push_back(skel.class_sizes[src]);
      t.class_reps.push_back(rep);
    }
    for (const auto& row : j.at("irreducibles")) {
      ClassFunction chi;
      for (const auto& v : row.at("values")) {
        chi.values.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
      }
      if (chi.values.size() != t.num_classes()) {
        throw Error(ErrorCode::InvalidArgument, "irreducible has wrong number of values");
      }
      t.degrees.push_back(row.at("degree").get<unsigned>());
      t.irreducibles.push_back(std::move(chi));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed character table JSON: ") + e.what());
  }
  if (!verify_orthogonality(t).pass) {
    throw Error(ErrorCode::ToleranceExceeded, "imported character table is not orthogonal");
  }
  return t;
}

}  // namespace commdeg
