#include "gin/graph_io.hpp"

#include <algorithm>
#include <sstream>

#include "gin/error.hpp"

namespace gin {

using nlohmann::json;

json graph_to_json(const LingLamGraph& graph) {
    json vars = json::array();
    for (const auto& v : graph.variables())
        vars.push_back({{"name", v.name}, {"kind", v.is_latent() ? "latent" : "observed"}});
    json edges = json::array();
    for (const auto& e : graph.edges())
        edges.push_back({{"from", e.from}, {"to", e.to}, {"coef", e.coef}});
    json noise = json::array();
    for (const auto& v : graph.variables()) {
        const auto& spec = graph.noise(v.index);
        json params = json::array();
        if (spec.family == NoiseFamily::Custom)
            for (double q : spec.quantiles) params.push_back(q);
        else
            params.push_back(spec.parameter);
        json entry = {{"var", v.name}, {"family", spec.family_name()}, {"params", params}};
        if (spec.scale != 1.0) entry["scale"] = spec.scale;
        noise.push_back(std::move(entry));
    }
    return {{"variables", vars}, {"edges", edges}, {"noise", noise}};
}

LingLamGraph graph_from_json(const json& doc) {
    try {
        std::vector<std::string> latents, observed;
        for (const auto& v : doc.at("variables")) {
            const auto kind = v.at("kind").get<std::string>();
            if (kind == "latent")
                latents.push_back(v.at("name").get<std::string>());
            else if (kind == "observed")
                observed.push_back(v.at("name").get<std::string>());
            else
                throw DataError("variable kind must be 'latent' or 'observed', got '" + kind + "'");
        }
        std::vector<EdgeSpec> edges;
        for (const auto& e : doc.at("edges"))
            edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                             e.at("coef").get<double>()});

        std::vector<std::string> order = latents;
        order.insert(order.end(), observed.begin(), observed.end());
        std::vector<NoiseSpec> noise(order.size(), NoiseSpec::uniform_power(5.0));
        std::vector<bool> given(order.size(), false);
        if (doc.contains("noise")) {
            for (const auto& n : doc.at("noise")) {
                const auto var = n.at("var").get<std::string>();
                const auto it = std::find(order.begin(), order.end(), var);
                if (it == order.end()) throw DataError("noise entry for unknown variable '" + var + "'");
                const auto idx = static_cast<std::size_t>(it - order.begin());
                NoiseSpec spec;
                spec.family = NoiseSpec::family_from_name(n.at("family").get<std::string>());
                const auto params = n.at("params").get<std::vector<double>>();
                if (spec.family == NoiseFamily::Custom) {
                    spec.quantiles = params;
                    spec.parameter = 0.0;
                } else {
                    if (params.size() != 1)
                        throw DataError("noise family " + spec.family_name() + " takes one parameter");
                    spec.parameter = params.front();
                }
                spec.scale = n.value("scale", 1.0);
                spec.validate();
                noise[idx] = std::move(spec);
                given[idx] = true;
            }
            for (std::size_t i = 0; i < order.size(); ++i)
                if (!given[i]) throw DataError("missing noise entry for '" + order[i] + "'");
        }
        return LingLamGraph(std::move(latents), std::move(observed), edges, std::move(noise));
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed graph JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("invalid graph: ") + e.what());
    }
}

std::string graph_to_dot(const LingLamGraph& graph) {
    std::ostringstream out;
    out << "digraph LiNGLaM {\n";
    for (const auto& v : graph.variables()) {
        out << "  \"" << v.name << "\" [shape=" << (v.is_latent() ? "circle" : "plaintext")
            << "];\n";
    }
    for (const auto& e : graph.edges())
        out << "  \"" << e.from << "\" -> \"" << e.to << "\" [label=\"" << e.coef << "\"];\n";
    out << "}\n";
    return out.str();
}

}  // namespace gin
