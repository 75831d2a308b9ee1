#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "singulab/poly.hpp"
#include "singulab/solver.hpp"

namespace singulab {

// Raised when a sampled configuration violates the genericity the theorems
// assume (root on a stratum frontier, ambiguous membership, positive
// dimensional solution sets, ...). Callers resample the direction.
class DegenerateConfiguration : public Error {
public:
    explicit DegenerateConfiguration(const std::string& why)
        : Error("degenerate configuration: " + why) {}
};

class UnstableEuler : public Error {
public:
    UnstableEuler(std::string why, std::vector<long long> tr)
        : Error("euler characteristic did not stabilize: " + why), trace(std::move(tr)) {}
    std::vector<long long> trace;
};

// One conjunctive piece of a region: all equalities = 0, all inequalities >= 0.
struct Clause {
    std::vector<Polynomial> equalities;
    std::vector<Polynomial> inequalities;
};

struct BallConstraint {
    std::vector<double> center;
    double radius = 0.0;
    bool sphere = false;  // false: |x-c| <= r, true: |x-c| = r
};

// Compact semialgebraic region: union of clauses, intersected with an
// optional ball/sphere constraint, optionally inside an affine slice.
struct RegionSpec {
    int dim = 0;  // ambient dimension of the polynomials
    std::vector<Clause> clauses;
    std::optional<BallConstraint> ball;
    std::optional<AffineFrame> frame;

    static RegionSpec single(int dim, std::vector<Polynomial> eqs,
                             std::vector<Polynomial> ineqs,
                             std::optional<BallConstraint> ball = std::nullopt);

    // Substitute the affine frame: returns an equivalent frame-free region in
    // slice coordinates. `empty_slice` is set when the ball misses the slice.
    RegionSpec reduced(bool* empty_slice = nullptr) const;

    void validate() const;
};

struct CubicalApproximation {
    int dim = 0;
    double h = 0.0;
    std::vector<double> origin;                 // grid origin (index 0 corner)
    std::vector<std::array<int32_t, 4>> cells;  // retained top cells, grid indices
    std::vector<double> tau;                    // equality thickening per clause-constraint (diagnostic)

    Box cell_box(size_t i) const;
};

struct EulerSchedule {
    double h0 = 0.0;          // 0 -> radius / 8
    int max_refinements = 4;  // number of halvings allowed after h0
    double h_trust = 0.0;     // 0 -> h0 / 8; agreement below this width is trusted
    size_t cell_budget = 3'000'000;
};

struct EulerEstimate {
    long long value = 0;
    std::vector<long long> trace;  // chi at h0, h0/2, ...
    bool stable = false;
    enum class Method { kCubical, kRootCount, kPointEval } method = Method::kCubical;
};

struct ComponentsResult {
    int count = 0;
    std::vector<std::vector<double>> samples;  // one representative per component
};

// Interval-test cubical cover of the region at resolution h.
CubicalApproximation cover(const RegionSpec& region, double h);

// Euler characteristic with grid-refinement stabilization. Regions that are
// provably zero dimensional are counted by certified root isolation instead.
EulerEstimate euler(const RegionSpec& region, const EulerSchedule& schedule = {});

ComponentsResult components(const RegionSpec& region, double h);

}  // namespace singulab
