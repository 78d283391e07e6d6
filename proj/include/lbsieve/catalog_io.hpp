#pragma once

// Region catalog file format: a JSON array of entries
//   {"name": N, "dim": D, "constraints": [{"coeffs": [...], "constant": C,
//    "strict": B}, ...]}
// One entry describes one convex part; a union is spelled as several entries
// sharing a name, in order.

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "lbsieve/errors.hpp"
#include "lbsieve/regions.hpp"

namespace lbsieve::regions::catalog {

inline std::vector<Entry> load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("region catalog: cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (!j.is_array()) throw parameter_error("region catalog: top level must be an array");

    std::vector<Entry> out;
    for (const auto& e : j) {
        std::string name = e.at("name").get<std::string>();
        int dim = e.at("dim").get<int>();
        std::vector<Constraint> cs;
        for (const auto& c : e.at("constraints")) {
            Constraint k;
            k.coeffs = c.at("coeffs").get<std::vector<double>>();
            if (static_cast<int>(k.coeffs.size()) != dim)
                throw parameter_error("region catalog: coeffs length != dim in " + name);
            k.constant = c.at("constant").get<double>();
            k.strict = c.at("strict").get<bool>();
            cs.push_back(std::move(k));
        }
        Entry* slot = nullptr;
        for (auto& prev : out)
            if (prev.name == name) slot = &prev;
        if (!slot) {
            out.push_back({name, RegionSet(dim, name)});
            slot = &out.back();
        } else if (slot->set.dim() != dim) {
            throw parameter_error("region catalog: mixed dims for " + name);
        }
        slot->set.add_part(Region(dim, std::move(cs)));
    }
    return out;
}

inline nlohmann::json to_json(const std::vector<Entry>& entries) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries)
        for (const auto& part : e.set.parts()) {
            nlohmann::json cs = nlohmann::json::array();
            for (const auto& c : part.constraints())
                cs.push_back({{"coeffs", c.coeffs},
                              {"constant", c.constant},
                              {"strict", c.strict}});
            arr.push_back({{"name", e.name},
                           {"dim", part.dim()},
                           {"constraints", std::move(cs)}});
        }
    return arr;
}

inline void save(const std::vector<Entry>& entries, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parameter_error("region catalog: cannot write " + path);
    out << to_json(entries).dump(1) << "\n";
}

} // namespace lbsieve::regions::catalog
