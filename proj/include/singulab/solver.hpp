#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "singulab/poly.hpp"

namespace singulab {

// Square polynomial system: m equations in m variables.
struct SquareSystem {
    std::vector<Polynomial> equations;

    SquareSystem() = default;
    explicit SquareSystem(std::vector<Polynomial> eqs);

    int nvars() const { return equations.empty() ? 0 : equations.front().nvars(); }
    int size() const { return static_cast<int>(equations.size()); }
};

struct CertifiedRoot {
    Box box;                 // tight enclosure of the root
    Box isolation;           // box in which uniqueness was established
    bool certified = false;
    double residual = 0.0;   // |F(mid)|_inf
    std::vector<double> midpoint() const { return box.midpoint(); }
};

struct UnresolvedBox {
    Box box;
    std::string reason;  // "max_depth" | "min_width"
};

struct SolveStats {
    uint64_t boxes_processed = 0;
    int max_depth = 0;
};

struct SolveReport {
    std::vector<CertifiedRoot> roots;
    std::vector<UnresolvedBox> unresolved;
    SolveStats stats;

    bool complete() const { return unresolved.empty(); }
};

struct SolveOptions {
    int max_depth = 60;
    double min_width = 1e-10;
    double tol = 1e-12;  // refinement target width for certified roots
};

// Branch-and-prune subdivision with a Krawczyk existence/uniqueness test.
// Every solution in the domain lies in some returned box (certified or
// unresolved); every certified box contains exactly one solution.
SolveReport isolate_roots(const SquareSystem& sys, const Box& domain,
                          const SolveOptions& opts = {});

// Contract a certified root box until its width is <= tol (or contraction
// stalls, in which case the achieved width is returned).
CertifiedRoot refine_root(const CertifiedRoot& root, const SquareSystem& sys, double tol);

}  // namespace singulab
