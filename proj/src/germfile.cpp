#include "singulab/germfile.hpp"

#include <json.hpp>

#include <fstream>
#include <regex>
#include <sstream>

namespace singulab {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& origin, const std::string& field,
                               const std::string& why) {
    throw Error(origin + ": schema violation at '" + field + "': " + why);
}

const Json& require(const Json& j, const std::string& origin, const std::string& field) {
    if (!j.contains(field)) schema_error(origin, field, "missing");
    return j.at(field);
}

bool known_assertion_key(const std::string& key) {
    static const std::regex pattern(
        "(le_greuel|corollary_isolated|lemma_link|gauss_bonnet|sigma_relation|curv_and_link|"
        "kinematic)\\.(lhs|rhs)|sigma\\.k[0-9]|density\\.value");
    return std::regex_match(key, pattern);
}

}  // namespace

Germ GermDocument::to_germ() const {
    Germ g;
    g.name = name;
    g.n = ambient_dim;
    g.origin_is_stratum = origin_is_stratum;
    for (const auto& st : strata) {
        Stratum s;
        for (const auto& t : st.equalities) s.equalities.push_back(parse_poly(t, variables));
        for (const auto& t : st.inequalities) s.inequalities.push_back(parse_poly(t, variables));
        s.dim = st.dim;
        g.strata.push_back(std::move(s));
    }
    g.validate();
    return g;
}

Polynomial GermDocument::f() const { return parse_poly(f_text, variables); }

std::optional<Polynomial> GermDocument::g() const {
    if (!g_text) return std::nullopt;
    return parse_poly(*g_text, variables);
}

GermDocument parse_germ_document(const std::string& text, const std::string& origin) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw Error(origin + ": not a well-formed document: " + e.what());
    }
    GermDocument doc;
    doc.name = require(j, origin, "name").get<std::string>();
    if (!require(j, origin, "ambient_dim").is_number_integer())
        schema_error(origin, "ambient_dim", "must be an integer");
    doc.ambient_dim = j.at("ambient_dim").get<int>();
    if (doc.ambient_dim < 1 || doc.ambient_dim > kMaxAmbientDim)
        schema_error(origin, "ambient_dim", "must be in 1..4");
    for (const auto& v : require(j, origin, "variables")) doc.variables.push_back(v.get<std::string>());
    if (static_cast<int>(doc.variables.size()) != doc.ambient_dim)
        schema_error(origin, "variables", "count must equal ambient_dim");

    const Json& strata = require(j, origin, "strata");
    if (!strata.is_array() || strata.empty()) schema_error(origin, "strata", "nonempty array required");
    for (size_t i = 0; i < strata.size(); ++i) {
        const Json& st = strata[i];
        const std::string where = "strata[" + std::to_string(i) + "]";
        GermDocument::StratumText s;
        for (const auto& e : require(st, origin, "equalities")) s.equalities.push_back(e.get<std::string>());
        if (st.contains("inequalities"))
            for (const auto& e : st.at("inequalities")) s.inequalities.push_back(e.get<std::string>());
        if (!st.contains("dim")) schema_error(origin, where + ".dim", "missing");
        s.dim = st.at("dim").get<int>();
        doc.strata.push_back(std::move(s));
    }

    doc.f_text = require(j, origin, "f").get<std::string>();
    if (j.contains("g") && !j.at("g").is_null()) doc.g_text = j.at("g").get<std::string>();
    if (j.contains("isolated_f")) doc.isolated_f = j.at("isolated_f").get<bool>();
    if (j.contains("origin_is_stratum")) doc.origin_is_stratum = j.at("origin_is_stratum").get<bool>();

    if (j.contains("scales")) {
        const Json& s = j.at("scales");
        if (s.contains("epsilon") && !s.at("epsilon").is_null())
            doc.epsilon = s.at("epsilon").get<double>();
        if (s.contains("delta_ratio")) doc.delta_ratio = s.at("delta_ratio").get<double>();
        if (s.contains("eta_ratio")) doc.eta_ratio = s.at("eta_ratio").get<double>();
    }
    if (j.contains("sampling")) {
        const Json& s = j.at("sampling");
        if (s.contains("n_samples")) doc.n_samples = s.at("n_samples").get<int>();
        if (s.contains("n_directions")) doc.n_directions = s.at("n_directions").get<int>();
        if (s.contains("seed")) doc.seed = s.at("seed").get<uint64_t>();
    }
    if (j.contains("assertions")) {
        for (const auto& a : j.at("assertions")) {
            Assertion as;
            as.key = require(a, origin, "key").get<std::string>();
            if (!known_assertion_key(as.key))
                schema_error(origin, "assertions", "unknown report field '" + as.key + "'");
            as.value = require(a, origin, "value").get<double>();
            if (a.contains("note")) as.note = a.at("note").get<std::string>();
            doc.assertions.push_back(std::move(as));
        }
    }

    // surface polynomial syntax errors with their position now
    for (size_t i = 0; i < doc.strata.size(); ++i) {
        for (const auto& t : doc.strata[i].equalities) parse_poly(t, doc.variables);
        for (const auto& t : doc.strata[i].inequalities) parse_poly(t, doc.variables);
    }
    parse_poly(doc.f_text, doc.variables);
    if (doc.g_text) parse_poly(*doc.g_text, doc.variables);
    return doc;
}

GermDocument load_germ(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open germ file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_germ_document(buf.str(), path);
}

std::string serialize_germ_document(const GermDocument& doc) {
    Json j;
    j["name"] = doc.name;
    j["ambient_dim"] = doc.ambient_dim;
    j["variables"] = doc.variables;
    j["strata"] = Json::array();
    for (const auto& st : doc.strata) {
        Json s;
        s["equalities"] = st.equalities;
        s["inequalities"] = st.inequalities;
        s["dim"] = st.dim;
        j["strata"].push_back(s);
    }
    j["f"] = doc.f_text;
    if (doc.g_text) j["g"] = *doc.g_text;
    else j["g"] = nullptr;
    j["isolated_f"] = doc.isolated_f;
    j["origin_is_stratum"] = doc.origin_is_stratum;
    j["scales"] = Json{{"epsilon", doc.epsilon ? Json(*doc.epsilon) : Json(nullptr)},
                       {"delta_ratio", doc.delta_ratio},
                       {"eta_ratio", doc.eta_ratio}};
    j["sampling"] = Json{{"n_samples", doc.n_samples},
                         {"n_directions", doc.n_directions},
                         {"seed", doc.seed}};
    j["assertions"] = Json::array();
    for (const auto& a : doc.assertions)
        j["assertions"].push_back(Json{{"key", a.key}, {"value", a.value}, {"note", a.note}});
    return j.dump(2) + "\n";
}

}  // namespace singulab
