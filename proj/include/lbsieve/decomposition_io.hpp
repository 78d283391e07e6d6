#pragma once

// Decomposition serialization: JSON object
//   {z0, z1_pieces, zeta, K, flags..., terms: [{depth, sign, classification,
//    cutoff, region_ref | region}]}
// where region_ref names an entry of the region catalog and inline regions
// carry their parts' constraints directly.

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lbsieve/catalog_io.hpp"
#include "lbsieve/decomposition.hpp"

namespace lbsieve::decomp {

namespace io_detail {

inline std::string cls_name(Classification c) {
    switch (c) {
        case Classification::Regular: return "regular";
        case Classification::Discard: return "discard";
        case Classification::Decompose: return "decompose";
        case Classification::Final: return "final";
    }
    return "regular";
}

inline Classification cls_from(const std::string& s) {
    if (s == "regular") return Classification::Regular;
    if (s == "discard") return Classification::Discard;
    if (s == "decompose") return Classification::Decompose;
    if (s == "final") return Classification::Final;
    throw parameter_error("decomposition: unknown classification '" + s + "'");
}

inline std::string cutoff_name(CutoffKind k) {
    switch (k) {
        case CutoffKind::Constant: return "constant";
        case CutoffKind::PrevAlpha: return "prev_alpha";
        case CutoffKind::Z1: return "z1";
    }
    return "constant";
}

inline CutoffKind cutoff_from(const std::string& s) {
    if (s == "constant") return CutoffKind::Constant;
    if (s == "prev_alpha") return CutoffKind::PrevAlpha;
    if (s == "z1") return CutoffKind::Z1;
    throw parameter_error("decomposition: unknown cutoff kind '" + s + "'");
}

inline nlohmann::json region_to_json(const regions::RegionSet& rs) {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& part : rs.parts()) {
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& c : part.constraints())
            cs.push_back({{"coeffs", c.coeffs},
                          {"constant", c.constant},
                          {"strict", c.strict}});
        parts.push_back(std::move(cs));
    }
    return {{"dim", rs.dim()}, {"parts", std::move(parts)}};
}

inline regions::RegionSet region_from_json(const nlohmann::json& j) {
    int dim = j.at("dim").get<int>();
    regions::RegionSet rs(dim);
    for (const auto& pj : j.at("parts")) {
        std::vector<regions::Constraint> cs;
        for (const auto& cj : pj) {
            regions::Constraint c;
            c.coeffs = cj.at("coeffs").get<std::vector<double>>();
            c.constant = cj.at("constant").get<double>();
            c.strict = cj.at("strict").get<bool>();
            cs.push_back(std::move(c));
        }
        rs.add_part(regions::Region(dim, std::move(cs)));
    }
    return rs;
}

inline bool in_catalog(const std::vector<regions::catalog::Entry>& cat,
                       const std::string& name) {
    for (const auto& e : cat)
        if (e.name == name) return true;
    return false;
}

} // namespace io_detail

inline nlohmann::json to_json(const Decomposition& d) {
    auto cat = regions::catalog::all();
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : d.terms()) {
        nlohmann::json tj{{"depth", t.depth},
                          {"sign", t.sign},
                          {"classification", io_detail::cls_name(t.cls)},
                          {"cutoff",
                           {{"kind", io_detail::cutoff_name(t.cutoff.kind)},
                            {"value", t.cutoff.value}}}};
        if (t.depth > 0) {
            if (!t.region.name().empty() && io_detail::in_catalog(cat, t.region.name()))
                tj["region_ref"] = t.region.name();
            else
                tj["region"] = io_detail::region_to_json(t.region);
        }
        terms.push_back(std::move(tj));
    }
    nlohmann::json z1 = nlohmann::json::array();
    for (auto [x, y] : d.z1.pts) z1.push_back({x, y});
    nlohmann::json out{{"z0", d.z0_exponent},
                       {"z1_pieces", std::move(z1)},
                       {"zeta", d.zeta},
                       {"K", d.K},
                       {"uses_role_reversals", d.uses_role_reversals},
                       {"is_stub", d.is_stub},
                       {"imported_deficit", d.imported_deficit},
                       {"terms", std::move(terms)}};
    if (!std::isnan(d.rr_min_pair_sum)) out["rr_min_pair_sum"] = d.rr_min_pair_sum;
    return out;
}

inline Decomposition from_json(const nlohmann::json& j,
                               const std::vector<regions::catalog::Entry>& cat) {
    Decomposition d;
    d.z0_exponent = j.at("z0").get<double>();
    d.z1.pts.clear();
    for (const auto& p : j.at("z1_pieces"))
        d.z1.pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    d.zeta = j.at("zeta").get<double>();
    d.K = j.at("K").get<int>();
    d.uses_role_reversals = j.at("uses_role_reversals").get<bool>();
    d.is_stub = j.at("is_stub").get<bool>();
    d.imported_deficit = j.at("imported_deficit").get<double>();
    if (j.contains("rr_min_pair_sum"))
        d.rr_min_pair_sum = j.at("rr_min_pair_sum").get<double>();

    std::vector<Term> terms;
    for (const auto& tj : j.at("terms")) {
        Term t;
        t.depth = tj.at("depth").get<int>();
        t.sign = tj.at("sign").get<int>();
        t.cls = io_detail::cls_from(tj.at("classification").get<std::string>());
        t.cutoff.kind = io_detail::cutoff_from(tj.at("cutoff").at("kind").get<std::string>());
        t.cutoff.value = tj.at("cutoff").at("value").get<double>();
        if (t.depth > 0) {
            if (tj.contains("region_ref")) {
                std::string ref = tj.at("region_ref").get<std::string>();
                t.region = regions::catalog::find(cat, ref);
            } else {
                t.region = io_detail::region_from_json(tj.at("region"));
                if (t.region.dim() != t.depth)
                    throw parameter_error("decomposition: region dim != term depth");
            }
        } else {
            t.region = regions::RegionSet(0);
        }
        terms.push_back(std::move(t));
    }
    d.set_terms(std::move(terms));
    return d;
}

inline void save_decomposition(const Decomposition& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parameter_error("decomposition: cannot write " + path);
    out << to_json(d).dump(1) << "\n";
}

inline Decomposition load_decomposition(const std::string& path,
                                        const std::vector<regions::catalog::Entry>& cat) {
    std::ifstream in(path);
    if (!in) throw parameter_error("decomposition: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j, cat);
}

} // namespace lbsieve::decomp
