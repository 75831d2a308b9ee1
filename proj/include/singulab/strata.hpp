#pragma once

#include <optional>
#include <string>
#include <vector>

#include "singulab/topo.hpp"

namespace singulab {

// One stratum: {equalities = 0, inequalities > 0} with its declared dimension.
struct Stratum {
    std::vector<Polynomial> equalities;
    std::vector<Polynomial> inequalities;
    int dim = 0;
};

// Stratified set germ (X, 0). Strata are pairwise disjoint, 0 lies in every
// closure, and their union is X near the origin.
struct Germ {
    std::string name;
    int n = 0;  // ambient dimension
    std::vector<Stratum> strata;
    bool origin_is_stratum = false;

    int dim() const;  // max stratum dimension
    int d0() const;   // dimension of the stratum containing 0

    // Numeric sanity checks: declared dimensions match Jacobian ranks at
    // sample points, 0 is in every stratum closure.
    void validate(uint64_t seed = 2) const;
};

// epsilon >> |delta| >> eta; index balls have radius |delta| / 2.
struct ScaleSchedule {
    double epsilon = 0.0;
    double delta_ratio = 0.01;  // signed
    double eta_ratio = 0.01;

    double delta() const { return delta_ratio * epsilon; }
    double eta() const { return eta_ratio * std::fabs(delta()); }
    double index_radius() const { return std::fabs(delta()) / 2.0; }
    ScaleSchedule halved() const { return {epsilon * 0.5, delta_ratio, eta_ratio}; }
    ScaleSchedule with_delta_sign(int sign) const {
        ScaleSchedule s = *this;
        s.delta_ratio = sign >= 0 ? std::fabs(delta_ratio) : -std::fabs(delta_ratio);
        return s;
    }
    void validate() const;
};

struct CriticalPointRecord {
    std::vector<double> x;
    CertifiedRoot root;
    int stratum = -1;
    double f_value = 0.0;
    double g_value = 0.0;
    int ind_plus = 0;   // ind(g, fibre, x)
    int ind_minus = 0;  // ind(-g, fibre, x)
    bool boundary = false;
    double rho_multiplier = 0.0;  // boundary points: multiplier against the distance gradient
    bool outward = false;
};

// X ∩ {f = delta} ∩ B_eps, one clause per stratum.
RegionSpec milnor_fibre(const Germ& germ, const Polynomial& f, const ScaleSchedule& sched);

// X ∩ S_eps.
RegionSpec link_region(const Germ& germ, double epsilon);

// X ∩ B_eps.
RegionSpec germ_ball_region(const Germ& germ, double epsilon);

// X ∩ {f = delta} ∩ S_eps.
RegionSpec fibre_sphere_region(const Germ& germ, const Polynomial& f, const ScaleSchedule& sched);

// Append an equality to every clause of a region.
RegionSpec with_equality(RegionSpec region, const Polynomial& p);

// Stratified critical points of g on the open Milnor fibre (Lagrange systems
// per stratum, multipliers normalized onto a half sphere). Indices are not
// filled in here; index_sums does that.
std::vector<CriticalPointRecord> fibre_critical_points(const Germ& germ, const Polynomial& f,
                                                       const Polynomial& g,
                                                       const ScaleSchedule& sched);

// Critical points of g on X ∩ {f = delta} ∩ S_eps, classified outward/inward
// by the sign of the distance multiplier.
std::vector<CriticalPointRecord> boundary_critical_points(const Germ& germ, const Polynomial& f,
                                                          const Polynomial& g,
                                                          const ScaleSchedule& sched);

// ind(g, Z, p) = 1 - chi(Z ∩ {g = g(p) - eta} ∩ B_r(p)).
int stratified_index(const RegionSpec& fibre, const Polynomial& g,
                     const std::vector<double>& p, double eta, double r);

struct IndexSums {
    long long i_plus = 0;
    long long i_minus = 0;
    std::vector<CriticalPointRecord> points;
};

// I(delta, eps, g) and I(delta, eps, -g) over the interior critical points.
IndexSums index_sums(const Germ& germ, const Polynomial& f, const Polynomial& g,
                     const ScaleSchedule& sched);

// Halve eps from 0.25 until chi(Lk(X)) agrees on two consecutive values.
double calibrate_epsilon(const Germ& germ);

}  // namespace singulab
