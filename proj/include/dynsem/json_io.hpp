#pragma once

// JSON forms of models, choice functions and verdicts.
//
// Model:  {"domain": 2,
//          "predicates": {"R": {"arity": 2, "tuples": [[0, 1]]}},
//          "functions":  {"c": {"arity": 0, "table": [[1]]}}}
// Function rows are the arguments followed by the value; missing rows map
// to 0. Choice function: {"domain": n, "choices": [...]}, indexed by the
// subset bitmask (element i is bit i).

#include "json.hpp"

#include "dynsem/drt.hpp"
#include "dynsem/epsilon.hpp"
#include "dynsem/models.hpp"
#include "dynsem/proofs.hpp"

namespace dynsem {

using json = nlohmann::ordered_json;

json to_json(const Model& m);
Model model_from_json(const json& j);

json to_json(const Assignment& g);

json to_json(const ChoiceFunction& c);
ChoiceFunction choice_from_json(const json& j);

json to_json(const drt::DRS& d);
json to_json(const nd::Violation& v);
json to_json(const nd::QuineVerdict& v);
json to_json(const nd::GentzenVerdict& v);
json to_json(const eps::Disabbreviation& d);

}  // namespace dynsem
