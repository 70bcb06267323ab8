#pragma once

#include <string>

#include "json.hpp"

#include "commdeg/character.hpp"
#include "commdeg/comm.hpp"

namespace commdeg {

using Json = nlohmann::ordered_json;

/// {group, H, K, n, m, g, method, value: {num, den}}
Json to_json(const ExactProb& p);
/// Rebuilds the parameters by re-parsing the group and subgroup specs.
ExactProb exact_prob_from_json(const Json& j, std::size_t max_order = kDefaultMaxOrder);

/// element_id,count rows with a header line.
std::string to_csv(const CommDistribution& d);

/// {order, classes: [{size, rep}], irreducibles: [{degree, values: [[re, im], ...]}]}
Json to_json(const CharacterTable& t);
/// Imports a table for `g`; classes are matched through their representatives.
/// Throws ToleranceExceeded when the imported table is not orthogonal.
CharacterTable character_table_from_json(const GroupPtr& g, const Json& j);

Method parse_method(const std::string& name);

}  // namespace commdeg
