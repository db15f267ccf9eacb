#pragma once

#include <string>

#include "json.hpp"
#include "polydyn/multipoly.hpp"

namespace polydyn {

// Rationals travel as [num, den] pairs; entries are int64 when they fit and
// decimal strings otherwise so arbitrary precision survives the round trip.
nlohmann::json rational_to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);

nlohmann::json poly_to_json(const MultiPoly& p);
MultiPoly poly_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace polydyn
