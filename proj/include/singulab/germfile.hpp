#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "singulab/strata.hpp"

namespace singulab {

struct Assertion {
    std::string key;  // e.g. "le_greuel.lhs", "sigma.k1", "density.value"
    double value = 0.0;
    std::string note;
};

// On-disk germ description: strata and functions as expression strings,
// optional scale/sampling overrides, and frozen expected values.
struct GermDocument {
    std::string name;
    int ambient_dim = 0;
    std::vector<std::string> variables;
    struct StratumText {
        std::vector<std::string> equalities;
        std::vector<std::string> inequalities;
        int dim = 0;
    };
    std::vector<StratumText> strata;
    std::string f_text;
    std::optional<std::string> g_text;
    bool isolated_f = false;
    bool origin_is_stratum = false;
    std::optional<double> epsilon;
    double delta_ratio = 0.01;
    double eta_ratio = 0.01;
    int n_samples = 2000;
    int n_directions = 50;
    uint64_t seed = 17;
    std::vector<Assertion> assertions;

    Germ to_germ() const;          // parses and numerically validates
    Polynomial f() const;
    std::optional<Polynomial> g() const;
};

GermDocument load_germ(const std::string& path);
GermDocument parse_germ_document(const std::string& text, const std::string& origin);
std::string serialize_germ_document(const GermDocument& doc);

}  // namespace singulab
