#pragma once

#include <string>

#include <json.hpp>

#include "gin/graph_model.hpp"

namespace gin {

// {variables:[{name,kind}], edges:[{from,to,coef}], noise:[{var,family,params}]}
// Latents may be listed in any position; they are re-indexed first on load.
nlohmann::json graph_to_json(const LingLamGraph& graph);
// Throws gin::DataError on a malformed document.
LingLamGraph graph_from_json(const nlohmann::json& doc);

// Latents as circles, observed variables as plain nodes.
std::string graph_to_dot(const LingLamGraph& graph);

}  // namespace gin
