#pragma once

#include "hat/model.hpp"

#include <json.hpp>

#include <string>

namespace hat {

using Json = nlohmann::ordered_json;

Json rational_to_json(const Rational& q);
Rational rational_from_json(const Json& j);
Json rvec_to_json(const RVec& v);
RVec rvec_from_json(const Json& j);

Json pwl_to_json(const PwlFn& f);
PwlFn pwl_from_json(const Json& j);

Json transformer_to_json(const Transformer& t);
/// Validates the result; malformed documents raise ErrorKind::Parse.
Transformer transformer_from_json(const Json& j);

std::string print_transformer(const Transformer& t);
Transformer parse_transformer(const std::string& text);

}  // namespace hat
