#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "singulab/integrate.hpp"
#include "singulab/strata.hpp"

namespace singulab {

struct VerificationReport {
    std::string theorem;
    std::string germ;
    double lhs = 0.0;
    double rhs = 0.0;
    double stderr_lhs = 0.0;
    double stderr_rhs = 0.0;
    bool pass = false;
    bool exact_rule = false;  // integer identity, compared exactly
    double epsilon = 0.0;
    double delta = 0.0;
    double eta = 0.0;
    int n_samples = 0;
    int resampled = 0;
    uint64_t seed = 0;
    long long wall_ms = 0;
    std::string error;               // nonempty when the checker aborted
    std::vector<std::string> notes;  // per-direction diagnostics, sub-results
};

struct CheckContext {
    int n_samples = 2000;
    uint64_t seed = 17;
    bool strict_unstable = false;         // unstable chi fails instead of resampling
    std::optional<Polynomial> g0;         // optional fixed first direction
    int k = 1;                            // slice codimension for sigma/kinematic
};

// chi(X ∩ H_{delta,v} ∩ B_eps) for the affine slice spanned by `dirs`
// shifted to delta * v.
long long slice_chi(const Germ& germ, const std::vector<std::vector<double>>& dirs,
                    const std::vector<double>& shift, const ScaleSchedule& sched);

// The germ X ∩ L sliced into the coordinates of span(dirs).
Germ slice_germ(const Germ& germ, const std::vector<std::vector<double>>& dirs);

// Theorem: I(d,e,g) + I(d,e,-g) = 2 chi(M) - chi(X∩f^{-1}(d)∩S_e) - chi(X^g∩f^{-1}(d)∩S_e)
VerificationReport check_le_greuel(const Germ& germ, const Polynomial& f,
                                   const ScaleSchedule& sched, const CheckContext& ctx);

// Isolated f-singularity variant with link terms on the right-hand side.
VerificationReport check_corollary_isolated(const Germ& germ, const Polynomial& f,
                                            const ScaleSchedule& sched, const CheckContext& ctx);

// chi(M^{+delta}) + chi(M^{-delta}) = chi(Lk X) + chi(Lk X^f)
VerificationReport check_lemma_link(const Germ& germ, const Polynomial& f,
                                    const ScaleSchedule& sched, const CheckContext& ctx);

// Asymptotic Gauss-Bonnet for the Milnor fibre (Monte-Carlo over directions).
VerificationReport estimate_gauss_bonnet(const Germ& germ, const Polynomial& f,
                                         const ScaleSchedule& sched, const CheckContext& ctx);

// Polar invariant sigma_k: average of chi over shifted (n-k)-slices.
MCEstimate sigma(const Germ& germ, int k, const ScaleSchedule& sched, int n_samples,
                 uint64_t seed);

// beta_0(H, v): Gauss-Bonnet mass of the sliced germ X ∩ (H ⊕ <v>) with f = v*.
MCEstimate beta0(const Germ& germ, const SubspaceSample& subspace, const std::vector<double>& v,
                 const ScaleSchedule& sched, int n_inner, uint64_t seed);

// Local density of X at 0: band measure of the cubical cover, Richardson
// extrapolated. Deliberately slice-free (it cross-checks the slicing routes).
MCEstimate density(const Germ& germ, const ScaleSchedule& sched);

// Infinitesimal kinematic formula at codimension k (triangle check against
// sigma differences and, for k = dim X, the measured density).
VerificationReport check_kinematic(const Germ& germ, const ScaleSchedule& sched,
                                   const CheckContext& ctx);

// sigma_0..sigma_n: direct slice definition vs link expression, plus
// sigma_k = 1 for k <= d_0.
VerificationReport check_sigma_relation(const Germ& germ, const ScaleSchedule& sched,
                                        const CheckContext& ctx);

// The limit Lipschitz-Killing densities via link averages vs sigma differences.
VerificationReport check_curv_and_link(const Germ& germ, const ScaleSchedule& sched,
                                       const CheckContext& ctx);

}  // namespace singulab
