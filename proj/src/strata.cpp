#include "singulab/strata.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "singulab/integrate.hpp"

namespace singulab {

int Germ::dim() const {
    int d = 0;
    for (const auto& s : strata) d = std::max(d, s.dim);
    return d;
}

int Germ::d0() const {
    for (const auto& s : strata) {
        bool contains_origin = true;
        for (const auto& p : s.equalities)
            if (p.constant_term() != 0) contains_origin = false;
        for (const auto& p : s.inequalities)
            if (p.constant_term() <= 0) contains_origin = false;
        if (contains_origin) return s.dim;
    }
    throw Error("germ: no stratum contains the origin");
}

void ScaleSchedule::validate() const {
    if (!(epsilon > 0.0)) throw Error("schedule: epsilon must be positive");
    if (!(std::fabs(delta_ratio) <= 0.1) || delta_ratio == 0.0)
        throw Error("schedule: |delta| must be << epsilon (ratio in (0, 0.1])");
    if (!(eta_ratio > 0.0 && eta_ratio <= 0.1))
        throw Error("schedule: eta must be << |delta| (ratio in (0, 0.1])");
}

namespace {

constexpr double kStratumTol = 1e-7;   // proximity tolerance for degeneracy checks
constexpr double kMultiplierTol = 1e-7;

std::vector<double> head(const std::vector<double>& v, int n) {
    return std::vector<double>(v.begin(), v.begin() + n);
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Lift a polynomial in n variables into a ring with extra trailing variables.
Polynomial lift(const Polynomial& p, int nv) {
    Polynomial out(nv);
    for (const auto& [e, c] : p.terms()) {
        Polynomial::Exponents ee(static_cast<size_t>(nv), 0u);
        std::copy(e.begin(), e.end(), ee.begin());
        out.add_term(std::move(ee), c);
    }
    return out;
}

Polynomial sphere_poly(int n, double radius) {
    Polynomial p = Polynomial::constant(n, rational_from_double(radius) * rational_from_double(radius));
    for (int i = 0; i < n; ++i) {
        Polynomial xi = Polynomial::variable(n, i);
        p -= xi * xi;
    }
    return p;  // radius^2 - |x|^2
}

// Gauss-Newton projection of a random seed point onto {equalities = 0}.
std::optional<std::vector<double>> project_to_stratum(const Stratum& st, int n,
                                                      std::vector<double> x) {
    if (st.equalities.empty()) return x;
    const int s = static_cast<int>(st.equalities.size());
    std::vector<std::vector<Polynomial>> grads;
    for (const auto& h : st.equalities) grads.push_back(gradient(h));
    for (int it = 0; it < 60; ++it) {
        Eigen::VectorXd r(s);
        Eigen::MatrixXd j(s, n);
        for (int i = 0; i < s; ++i) {
            r(i) = st.equalities[static_cast<size_t>(i)].eval(x);
            for (int c = 0; c < n; ++c)
                j(i, c) = grads[static_cast<size_t>(i)][static_cast<size_t>(c)].eval(x);
        }
        if (r.norm() < 1e-13) return x;
        Eigen::VectorXd step = j.completeOrthogonalDecomposition().solve(r);
        if (!step.allFinite()) return std::nullopt;
        for (int c = 0; c < n; ++c) x[static_cast<size_t>(c)] -= step(c);
    }
    return std::nullopt;
}

int jacobian_rank(const Stratum& st, int n, const std::vector<double>& x) {
    if (st.equalities.empty()) return 0;
    const int s = static_cast<int>(st.equalities.size());
    Eigen::MatrixXd j(s, n);
    for (int i = 0; i < s; ++i) {
        auto g = gradient(st.equalities[static_cast<size_t>(i)]);
        for (int c = 0; c < n; ++c) j(i, c) = g[static_cast<size_t>(c)].eval(x);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
    double top = svd.singularValues()(0);
    if (top <= 0.0) return 0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-8 * top) ++rank;
    return rank;
}

}  // namespace

void Germ::validate(uint64_t seed) const {
    if (n < 1 || n > kMaxAmbientDim) throw Error("germ: ambient dimension out of range");
    if (strata.empty()) throw Error("germ: no strata");
    d0();  // throws when no stratum contains the origin
    Rng rng(seed);
    for (size_t si = 0; si < strata.size(); ++si) {
        const Stratum& st = strata[si];
        for (const auto& p : st.equalities)
            if (p.nvars() != n) throw Error("germ: stratum equality arity mismatch");
        for (const auto& p : st.inequalities)
            if (p.nvars() != n) throw Error("germ: stratum inequality arity mismatch");
        // closure contains 0: projected sample points exist at shrinking radii
        for (double radius : {0.2, 0.02}) {
            bool found = false;
            for (int attempt = 0; attempt < 200 && !found; ++attempt) {
                std::vector<double> seed_pt(static_cast<size_t>(n));
                for (auto& c : seed_pt) c = radius * rng.gaussian() * 0.5;
                auto proj = project_to_stratum(st, n, seed_pt);
                if (!proj) continue;
                if (norm2(*proj) > 4.0 * radius + 1e-9) continue;
                bool interior = true;
                for (const auto& q : st.inequalities)
                    if (q.eval(*proj) <= 1e-12) interior = false;
                if (!interior) continue;
                int rank = jacobian_rank(st, n, *proj);
                if (n - rank != st.dim)
                    throw Error("germ '" + name + "': declared dimension of stratum " +
                                std::to_string(si) + " disagrees with Jacobian rank");
                found = true;
            }
            if (!found)
                throw Error("germ '" + name + "': no sample point found on stratum " +
                            std::to_string(si) + " near the origin");
        }
    }
}

RegionSpec germ_ball_region(const Germ& germ, double epsilon) {
    RegionSpec r;
    r.dim = germ.n;
    for (const auto& st : germ.strata)
        r.clauses.push_back(Clause{st.equalities, st.inequalities});
    r.ball = BallConstraint{std::vector<double>(static_cast<size_t>(germ.n), 0.0), epsilon, false};
    return r;
}

RegionSpec link_region(const Germ& germ, double epsilon) {
    RegionSpec r = germ_ball_region(germ, epsilon);
    r.ball->sphere = true;
    return r;
}

RegionSpec milnor_fibre(const Germ& germ, const Polynomial& f, const ScaleSchedule& sched) {
    sched.validate();
    RegionSpec r = germ_ball_region(germ, sched.epsilon);
    Polynomial level = f - Polynomial::constant(germ.n, rational_from_double(sched.delta()));
    return with_equality(std::move(r), level);
}

RegionSpec fibre_sphere_region(const Germ& germ, const Polynomial& f, const ScaleSchedule& sched) {
    RegionSpec r = milnor_fibre(germ, f, sched);
    r.ball->sphere = true;
    return r;
}

RegionSpec with_equality(RegionSpec region, const Polynomial& p) {
    for (auto& cl : region.clauses) cl.equalities.push_back(p);
    return region;
}

namespace {

struct LagrangeSetup {
    SquareSystem sys;
    Box domain;
    int n;       // ambient variables come first
    int s;       // stratum equality count
    bool boundary;
};

// Unknowns: x (n), a0, aF, mu_1..mu_s [, aR]; the multiplier vector is
// normalized onto the unit sphere with a0 >= 0, so the domain stays bounded
// even when stratum gradients are tiny.
LagrangeSetup build_lagrange(const Germ& germ, const Stratum& st, const Polynomial& f,
                             const Polynomial& g, const ScaleSchedule& sched, bool boundary) {
    const int n = germ.n;
    const int s = static_cast<int>(st.equalities.size());
    const int nv = n + 2 + s + (boundary ? 1 : 0);

    std::vector<Polynomial> eqs;
    for (const auto& h : st.equalities) eqs.push_back(lift(h, nv));
    eqs.push_back(lift(f - Polynomial::constant(n, rational_from_double(sched.delta())), nv));
    if (boundary) eqs.push_back(lift(sphere_poly(n, sched.epsilon), nv));

    Polynomial a0 = Polynomial::variable(nv, n);
    Polynomial aF = Polynomial::variable(nv, n + 1);
    std::vector<Polynomial> mus;
    for (int j = 0; j < s; ++j) mus.push_back(Polynomial::variable(nv, n + 2 + j));
    Polynomial aR = boundary ? Polynomial::variable(nv, n + 2 + s) : Polynomial(nv);

    auto df = gradient(f);
    auto dg = gradient(g);
    std::vector<std::vector<Polynomial>> dh;
    for (const auto& h : st.equalities) dh.push_back(gradient(h));

    for (int i = 0; i < n; ++i) {
        Polynomial row = a0 * lift(dg[static_cast<size_t>(i)], nv) - aF * lift(df[static_cast<size_t>(i)], nv);
        for (int j = 0; j < s; ++j)
            row -= mus[static_cast<size_t>(j)] * lift(dh[static_cast<size_t>(j)][static_cast<size_t>(i)], nv);
        if (boundary) row -= aR * Polynomial::variable(nv, i);  // grad rho ~ x
        eqs.push_back(std::move(row));
    }

    Polynomial unit = a0 * a0 + aF * aF - Polynomial::constant(nv, 1);
    for (const auto& mu : mus) unit += mu * mu;
    if (boundary) unit += aR * aR;
    eqs.push_back(std::move(unit));

    LagrangeSetup setup;
    setup.sys = SquareSystem(std::move(eqs));
    setup.n = n;
    setup.s = s;
    setup.boundary = boundary;
    Box dom;
    dom.coords.assign(static_cast<size_t>(nv), Interval(-1.0, 1.0));
    double xr = 1.02 * sched.epsilon;
    for (int i = 0; i < n; ++i) dom.coords[static_cast<size_t>(i)] = Interval(-xr, xr);
    dom.coords[static_cast<size_t>(n)] = Interval(0.0, 1.0);  // a0 >= 0
    setup.domain = dom;
    return setup;
}

// distance estimate |h(x)| / |grad h(x)| per equality; the max over the
// stratum's equalities is a first-order distance to its zero set
double stratum_distance_estimate(const Stratum& st, const std::vector<double>& x) {
    double d = 0.0;
    for (const auto& h : st.equalities) {
        double v = std::fabs(h.eval(x));
        auto g = gradient(h);
        double gn = 0.0;
        for (const auto& gi : g) {
            double t = gi.eval(x);
            gn += t * t;
        }
        gn = std::sqrt(gn);
        d = std::max(d, v / std::max(gn, 1e-6));
    }
    return d;
}

bool near_other_stratum(const Germ& germ, size_t own, const std::vector<double>& x) {
    for (size_t i = 0; i < germ.strata.size(); ++i) {
        if (i == own) continue;
        const Stratum& st = germ.strata[i];
        if (st.dim >= germ.strata[own].dim) continue;
        if (stratum_distance_estimate(st, x) > kStratumTol) continue;
        bool in_closure = true;
        for (const auto& q : st.inequalities)
            if (q.eval(x) < -kStratumTol) in_closure = false;
        if (in_closure) return true;
    }
    return false;
}

std::vector<CriticalPointRecord> critical_points_impl(const Germ& germ, const Polynomial& f,
                                                      const Polynomial& g,
                                                      const ScaleSchedule& sched, bool boundary) {
    sched.validate();
    std::vector<CriticalPointRecord> out;
    const double eps = sched.epsilon;

    for (size_t si = 0; si < germ.strata.size(); ++si) {
        const Stratum& st = germ.strata[si];
        if (st.dim < 1) continue;  // the fibre misses 0-dimensional strata
        LagrangeSetup setup = build_lagrange(germ, st, f, g, sched, boundary);
        SolveOptions opts;
        SolveReport rep = isolate_roots(setup.sys, setup.domain, opts);

        for (const auto& ub : rep.unresolved) {
            // unresolved boxes whose x-part cannot reach the ball are harmless
            double lo = 0.0;
            for (int i = 0; i < setup.n; ++i) {
                double m = ub.box.coords[static_cast<size_t>(i)].mig();
                lo += m * m;
            }
            if (std::sqrt(lo) <= eps * 1.0001)
                throw DegenerateConfiguration("solver could not resolve the polar system (" +
                                              ub.reason + ")");
        }

        for (const auto& root : rep.roots) {
            CertifiedRoot tight = refine_root(root, setup.sys, 1e-12);
            std::vector<double> mid = tight.box.midpoint();
            std::vector<double> x = head(mid, setup.n);
            double r = norm2(x);
            double a0 = mid[static_cast<size_t>(setup.n)];

            if (boundary) {
                // the sphere equation pins |x| = eps already
                if (a0 < kMultiplierTol)
                    throw DegenerateConfiguration("boundary multiplier a0 ~ 0");
            } else {
                if (r > eps + kStratumTol) continue;  // outside the closed ball
                if (r > eps - kStratumTol)
                    throw DegenerateConfiguration("interior critical point within tol of S_eps");
                if (a0 < kMultiplierTol)
                    throw DegenerateConfiguration("multiplier a0 ~ 0 (rank-deficient configuration)");
            }

            for (const auto& q : st.inequalities)
                if (q.eval(x) <= 0.0 && stratum_distance_estimate(st, x) <= kStratumTol)
                    throw DegenerateConfiguration("critical point on stratum frontier");
            if (near_other_stratum(germ, si, x))
                throw DegenerateConfiguration("critical point within tol of a lower stratum");

            CriticalPointRecord rec;
            rec.x = x;
            rec.root = tight;
            rec.stratum = static_cast<int>(si);
            rec.f_value = f.eval(x);
            rec.g_value = g.eval(x);
            rec.boundary = boundary;
            if (std::fabs(rec.g_value) <= kStratumTol) {
                if (boundary)
                    throw DegenerateConfiguration("boundary critical point with g = 0");
                throw DegenerateConfiguration("interior critical value g = 0");
            }
            if (boundary) {
                double aR = mid[static_cast<size_t>(setup.n + 2 + setup.s)];
                rec.rho_multiplier = aR / a0;
                rec.outward = rec.rho_multiplier > 0.0;
            }
            out.push_back(std::move(rec));
        }
    }

    // duplicates across strata would mean a point sits on two strata at once
    for (size_t i = 0; i < out.size(); ++i)
        for (size_t j = i + 1; j < out.size(); ++j) {
            double d = 0.0;
            for (int c = 0; c < germ.n; ++c)
                d = std::max(d, std::fabs(out[i].x[static_cast<size_t>(c)] - out[j].x[static_cast<size_t>(c)]));
            if (d <= kStratumTol)
                throw DegenerateConfiguration("critical point shared by two strata");
        }

    std::sort(out.begin(), out.end(), [](const CriticalPointRecord& a, const CriticalPointRecord& b) {
        return a.x < b.x;
    });
    return out;
}

}  // namespace

std::vector<CriticalPointRecord> fibre_critical_points(const Germ& germ, const Polynomial& f,
                                                       const Polynomial& g,
                                                       const ScaleSchedule& sched) {
    return critical_points_impl(germ, f, g, sched, false);
}

std::vector<CriticalPointRecord> boundary_critical_points(const Germ& germ, const Polynomial& f,
                                                          const Polynomial& g,
                                                          const ScaleSchedule& sched) {
    return critical_points_impl(germ, f, g, sched, true);
}

int stratified_index(const RegionSpec& fibre, const Polynomial& g,
                     const std::vector<double>& p, double eta, double r) {
    double level = g.eval(p) - eta;
    RegionSpec region = with_equality(fibre, g - Polynomial::constant(g.nvars(), rational_from_double(level)));
    region.ball = BallConstraint{p, r, false};

    EulerSchedule sched;
    sched.h0 = r / 8.0;
    sched.h_trust = std::min(r / 64.0, eta / 4.0);
    sched.max_refinements = 14;
    EulerEstimate chi = euler(region, sched);
    return 1 - static_cast<int>(chi.value);
}

IndexSums index_sums(const Germ& germ, const Polynomial& f, const Polynomial& g,
                     const ScaleSchedule& sched) {
    IndexSums sums;
    sums.points = fibre_critical_points(germ, f, g, sched);
    if (sums.points.empty()) return sums;
    RegionSpec fibre = milnor_fibre(germ, f, sched);
    fibre.ball.reset();  // the index ball localizes instead
    const double eta = sched.eta();
    const double r = sched.index_radius();
    for (auto& rec : sums.points) {
        rec.ind_plus = stratified_index(fibre, g, rec.x, eta, r);
        rec.ind_minus = stratified_index(fibre, -g, rec.x, eta, r);
        sums.i_plus += rec.ind_plus;
        sums.i_minus += rec.ind_minus;
    }
    return sums;
}

double calibrate_epsilon(const Germ& germ) {
    long long prev = 0;
    bool have_prev = false;
    for (double eps = 0.25; eps > 0.25 / 128.0; eps *= 0.5) {
        EulerEstimate chi = euler(link_region(germ, eps));
        if (have_prev && chi.value == prev) return eps;
        prev = chi.value;
        have_prev = true;
    }
    throw Error("calibrate_epsilon: link did not stabilize over the epsilon ladder");
}

}  // namespace singulab
