#pragma once

#include <filesystem>
#include <string>

#include "omla/model.hpp"

namespace omla {

// Instance JSON document:
//   { "T": int, "L": int,
//     "machines": [{"id": int, "budget": int | "inf"}],
//     "tasks":    [{"id": int}],
//     "edges":    [{"id": int, "u": int, "v": int, "q": real}],
//     "rewards":  {"<edge id>": {"<level 1..L>": real}},
//     "theta":    [int x L],
//     "arrivals": [[p_{v,1} .. p_{v,T}] per task],
//     "delays":   [{"pmf": {"<d>": real}} per level] }
// Unknown keys are rejected at every level.

Instance instance_from_json(const std::string& text);
std::string instance_to_json(const Instance& instance);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& instance, const std::filesystem::path& path);

}  // namespace omla
