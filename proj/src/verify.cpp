#include "singulab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace singulab {

namespace {

using Clock = std::chrono::steady_clock;

long long elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

EulerSchedule fibre_schedule(const ScaleSchedule& sched) {
    EulerSchedule s;
    s.h0 = sched.epsilon / 8.0;
    s.h_trust = std::min(sched.epsilon / 64.0, std::fabs(sched.delta()) / 4.0);
    s.max_refinements = 16;
    return s;
}

EulerSchedule link_schedule(double radius) {
    EulerSchedule s;
    s.h0 = radius / 8.0;
    s.h_trust = radius / 64.0;
    s.max_refinements = 16;
    return s;
}

EulerSchedule slice_schedule(const ScaleSchedule& sched, double radius) {
    EulerSchedule s;
    s.h0 = radius / 8.0;
    s.h_trust = std::min(radius / 64.0, std::fabs(sched.delta()) / 16.0);
    s.max_refinements = 18;
    return s;
}

Polynomial linear_form(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    Polynomial p(n);
    for (int i = 0; i < n; ++i)
        p += rational_from_double(v[static_cast<size_t>(i)]) * Polynomial::variable(n, i);
    return p;
}

std::vector<double> negate(std::vector<double> v) {
    for (auto& x : v) x = -x;
    return v;
}

// Deterministic direction stream with a resample budget (5% of the target
// count). Exhausting the budget aborts the enclosing checker.
struct DirectionBudget {
    int target;
    int resampled = 0;

    void note_resample(const std::string& what, std::vector<std::string>* notes) {
        ++resampled;
        notes->push_back("resampled: " + what);
        if (resampled > std::max(10, target / 20))
            throw Error("more than 5% of sampled directions were degenerate");
    }
};

long long checked_chi(const RegionSpec& region, const EulerSchedule& sched) {
    return euler(region, sched).value;
}

// chi(X^g ∩ f^{-1}(delta) ∩ S_eps); vanishes without computation for curve
// germs, mirroring the dimension remark the identities rely on.
long long xg_fibre_sphere_chi(const Germ& germ, const Polynomial& f, const Polynomial& g,
                              const ScaleSchedule& sched) {
    if (germ.dim() <= 1) return 0;
    RegionSpec region = with_equality(fibre_sphere_region(germ, f, sched), g);
    return checked_chi(region, fibre_schedule(sched));
}

struct LeGreuelSides {
    long long lhs = 0;
    long long term_fibre = 0;         // 2 chi(M)
    long long term_fibre_sphere = 0;  // chi(X ∩ f^{-1}(delta) ∩ S_eps)
};

LeGreuelSides le_greuel_common(const Germ& germ, const Polynomial& f, const ScaleSchedule& sched) {
    LeGreuelSides sides;
    sides.term_fibre = 2 * checked_chi(milnor_fibre(germ, f, sched), fibre_schedule(sched));
    sides.term_fibre_sphere = checked_chi(fibre_sphere_region(germ, f, sched), fibre_schedule(sched));
    return sides;
}

VerificationReport base_report(const std::string& theorem, const Germ& germ,
                               const ScaleSchedule& sched, const CheckContext& ctx) {
    VerificationReport rep;
    rep.theorem = theorem;
    rep.germ = germ.name;
    rep.epsilon = sched.epsilon;
    rep.delta = sched.delta();
    rep.eta = sched.eta();
    rep.seed = ctx.seed;
    rep.n_samples = ctx.n_samples;
    return rep;
}

}  // namespace

Germ slice_germ(const Germ& germ, const std::vector<std::vector<double>>& dirs) {
    AffineFrame frame;
    frame.base.assign(static_cast<size_t>(germ.n), 0.0);
    frame.dirs = dirs;
    frame.validate();
    const int m = static_cast<int>(dirs.size());
    Germ out;
    out.name = germ.name + "|slice";
    out.n = m;
    out.origin_is_stratum = germ.origin_is_stratum;
    for (const auto& st : germ.strata) {
        Stratum s;
        for (const auto& p : st.equalities) s.equalities.push_back(restrict_affine(p, frame));
        for (const auto& p : st.inequalities) s.inequalities.push_back(restrict_affine(p, frame));
        s.dim = std::max(st.dim - (germ.n - m), 0);
        out.strata.push_back(std::move(s));
    }
    return out;
}

long long slice_chi(const Germ& germ, const std::vector<std::vector<double>>& dirs,
                    const std::vector<double>& shift, const ScaleSchedule& sched) {
    RegionSpec region = germ_ball_region(germ, sched.epsilon);
    AffineFrame frame;
    frame.base = shift;
    frame.dirs = dirs;
    region.frame = frame;
    return checked_chi(region, slice_schedule(sched, sched.epsilon));
}

VerificationReport check_le_greuel(const Germ& germ, const Polynomial& f,
                                   const ScaleSchedule& sched, const CheckContext& ctx) {
    auto t0 = Clock::now();
    VerificationReport rep = base_report("le_greuel", germ, sched, ctx);
    rep.exact_rule = true;
    try {
        LeGreuelSides sides = le_greuel_common(germ, f, sched);
        Rng rng(ctx.seed);
        DirectionBudget budget{ctx.n_samples};
        rep.pass = true;
        bool first = true;
        for (int d = 0; d < ctx.n_samples; ++d) {
            while (true) {
                Polynomial g = (d == 0 && ctx.g0) ? *ctx.g0 : linear_form(draw_direction(germ.n, rng).v);
                try {
                    IndexSums sums = index_sums(germ, f, g, sched);
                    long long lhs = sums.i_plus + sums.i_minus;
                    long long rhs = sides.term_fibre - sides.term_fibre_sphere -
                                    xg_fibre_sphere_chi(germ, f, g, sched);
                    if (first) {
                        rep.lhs = static_cast<double>(lhs);
                        rep.rhs = static_cast<double>(rhs);
                        first = false;
                    }
                    if (lhs != rhs) {
                        rep.pass = false;
                        rep.notes.push_back("direction " + std::to_string(d) + ": lhs " +
                                            std::to_string(lhs) + " != rhs " + std::to_string(rhs));
                    }
                    break;
                } catch (const DegenerateConfiguration& e) {
                    budget.note_resample(e.what(), &rep.notes);
                } catch (const UnstableEuler& e) {
                    if (ctx.strict_unstable) throw;
                    budget.note_resample(e.what(), &rep.notes);
                }
            }
        }
        rep.resampled = budget.resampled;
    } catch (const std::exception& e) {
        rep.error = e.what();
        rep.pass = false;
    }
    rep.wall_ms = elapsed_ms(t0);
    return rep;
}

VerificationReport check_corollary_isolated(const Germ& germ, const Polynomial& f,
                                            const ScaleSchedule& sched, const CheckContext& ctx) {
    auto t0 = Clock::now();
    VerificationReport rep = base_report("corollary_isolated", germ, sched, ctx);
    rep.exact_rule = true;
    try {
        long long two_chi_m = 2 * checked_chi(milnor_fibre(germ, f, sched), fibre_schedule(sched));
        RegionSpec lk_xf = with_equality(link_region(germ, sched.epsilon), f);
        long long chi_lk_xf = checked_chi(lk_xf, link_schedule(sched.epsilon));

        Rng rng(ctx.seed);
        DirectionBudget budget{ctx.n_samples};
        rep.pass = true;
        bool first = true;
        for (int d = 0; d < ctx.n_samples; ++d) {
            while (true) {
                Polynomial g = (d == 0 && ctx.g0) ? *ctx.g0 : linear_form(draw_direction(germ.n, rng).v);
                try {
                    IndexSums sums = index_sums(germ, f, g, sched);
                    long long lhs = sums.i_plus + sums.i_minus;
                    long long chi_lk_xfg = 0;
                    if (germ.dim() >= 2)
                        chi_lk_xfg = checked_chi(with_equality(lk_xf, g), link_schedule(sched.epsilon));
                    long long rhs = two_chi_m - chi_lk_xf - chi_lk_xfg;
                    if (first) {
                        rep.lhs = static_cast<double>(lhs);
                        rep.rhs = static_cast<double>(rhs);
                        first = false;
                    }
                    if (lhs != rhs) {
                        rep.pass = false;
                        rep.notes.push_back("direction " + std::to_string(d) + ": lhs " +
                                            std::to_string(lhs) + " != rhs " + std::to_string(rhs));
                    }
                    break;
                } catch (const DegenerateConfiguration& e) {
                    budget.note_resample(e.what(), &rep.notes);
                } catch (const UnstableEuler& e) {
                    if (ctx.strict_unstable) throw;
                    budget.note_resample(e.what(), &rep.notes);
                }
            }
        }
        rep.resampled = budget.resampled;
    } catch (const std::exception& e) {
        rep.error = e.what();
        rep.pass = false;
    }
    rep.wall_ms = elapsed_ms(t0);
    return rep;
}

VerificationReport check_lemma_link(const Germ& germ, const Polynomial& f,
                                    const ScaleSchedule& sched, const CheckContext& ctx) {
    auto t0 = Clock::now();
    VerificationReport rep = base_report("lemma_link", germ, sched, ctx);
    rep.exact_rule = true;
    rep.n_samples = 0;
    try {
        long long chi_plus = checked_chi(milnor_fibre(germ, f, sched.with_delta_sign(+1)),
                                         fibre_schedule(sched));
        long long chi_minus = checked_chi(milnor_fibre(germ, f, sched.with_delta_sign(-1)),
                                          fibre_schedule(sched));
        long long chi_lk_x = checked_chi(link_region(germ, sched.epsilon), link_schedule(sched.epsilon));
        long long chi_lk_xf = checked_chi(with_equality(link_region(germ, sched.epsilon), f),
                                          link_schedule(sched.epsilon));
        rep.lhs = static_cast<double>(chi_plus + chi_minus);
        rep.rhs = static_cast<double>(chi_lk_x + chi_lk_xf);
        rep.pass = chi_plus + chi_minus == chi_lk_x + chi_lk_xf;
        rep.notes.push_back("chi(M+) = " + std::to_string(chi_plus) + ", chi(M-) = " +
                            std::to_string(chi_minus) + ", chi(LkX) = " + std::to_string(chi_lk_x) +
                            ", chi(LkX^f) = " + std::to_string(chi_lk_xf));
    } catch (const std::exception& e) {
        rep.error = e.what();
        rep.pass = false;
    }
    rep.wall_ms = elapsed_ms(t0);
    return rep;
}

VerificationReport estimate_gauss_bonnet(const Germ& germ, const Polynomial& f,
                                         const ScaleSchedule& sched, const CheckContext& ctx) {
    auto t0 = Clock::now();
    VerificationReport rep = base_report("gauss_bonnet", germ, sched, ctx);
    try {
        long long chi_m = checked_chi(milnor_fibre(germ, f, sched), fibre_schedule(sched));
        long long chi_fs = checked_chi(fibre_sphere_region(germ, f, sched), fibre_schedule(sched));

        Rng rng(ctx.seed);
        DirectionBudget budget{ctx.n_samples};
        std::vector<double> lhs_values, slice_terms;
        lhs_values.reserve(static_cast<size_t>(ctx.n_samples));
        while (static_cast<int>(lhs_values.size()) < ctx.n_samples) {
            DirectionSample v = draw_direction(germ.n, rng);
            try {
                Polynomial g = linear_form(v.v);
                IndexSums sums = index_sums(germ, f, g, sched);
                lhs_values.push_back(0.5 * static_cast<double>(sums.i_plus + sums.i_minus));
                slice_terms.push_back(static_cast<double>(xg_fibre_sphere_chi(germ, f, g, sched)));
            } catch (const DegenerateConfiguration& e) {
                budget.note_resample(e.what(), &rep.notes);
            } catch (const UnstableEuler& e) {
                if (ctx.strict_unstable) throw;
                budget.note_resample(e.what(), &rep.notes);
            }
        }
        MCEstimate lhs = mc_mean(lhs_values, ctx.seed);
        MCEstimate third = mc_mean(slice_terms, ctx.seed);
        rep.lhs = lhs.mean;
        rep.stderr_lhs = lhs.stderr_;
        rep.rhs = static_cast<double>(chi_m) - 0.5 * static_cast<double>(chi_fs) - 0.5 * third.mean;
        rep.stderr_rhs = 0.5 * third.stderr_;
        rep.resampled = budget.resampled;
        rep.pass = std::fabs(rep.lhs - rep.rhs) <= 3.0 * (rep.stderr_lhs + rep.stderr_rhs) + 1e-12;
    } catch (const std::exception& e) {
        rep.error = e.what();
        rep.pass = false;
    }
    rep.wall_ms = elapsed_ms(t0);
    return rep;
}

namespace {

// one paired sigma_k sample: H Haar in G_n^{n-k}, v uniform in the unit
// sphere of H^perp, averaged over +v/-v
double sigma_sample(const Germ& germ, int k, const ScaleSchedule& sched, Rng& rng) {
    SubspaceSample sub = draw_subspace(germ.n, germ.n - k, rng);
    std::vector<double> coeff(static_cast<size_t>(k));
    double nn = 0.0;
    while (nn < 1e-6) {
        nn = 0.0;
        for (auto& c : coeff) c = rng.gaussian();
        for (double c : coeff) nn += c * c;
        nn = std::sqrt(nn);
    }
    std::vector<double> v(static_cast<size_t>(germ.n), 0.0);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < germ.n; ++i)
            v[static_cast<size_t>(i)] += coeff[static_cast<size_t>(j)] / nn *
                                         sub.complement[static_cast<size_t>(j)][static_cast<size_t>(i)];

    const double delta = std::fabs(sched.delta());
    std::vector<double> shift_plus(v), shift_minus(v);
    for (auto& x : shift_plus) x *= delta;
    for (auto& x : shift_minus) x *= -delta;
    long long lp = slice_chi(germ, sub.frame, shift_plus, sched);
    long long lm = slice_chi(germ, sub.frame, shift_minus, sched);
    return 0.5 * static_cast<double>(lp + lm);
}

}  // namespace

MCEstimate sigma(const Germ& germ, int k, const ScaleSchedule& sched, int n_samples,
                 uint64_t seed) {
    if (k < 0 || k > germ.n) throw Error("sigma: k out of range");
    if (k == 0) return MCEstimate{1.0, 0.0, static_cast<size_t>(n_samples), seed};
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(k));
    std::vector<double> values;
    values.reserve(static_cast<size_t>(n_samples));
    int resampled = 0;
    while (static_cast<int>(values.size()) < n_samples) {
        try {
            values.push_back(sigma_sample(germ, k, sched, rng));
        } catch (const DegenerateConfiguration&) {
            if (++resampled > std::max(10, n_samples / 20))
                throw Error("sigma: too many degenerate slices");
        } catch (const UnstableEuler&) {
            if (++resampled > std::max(10, n_samples / 20))
                throw Error("sigma: too many unstable slices");
        }
    }
    return mc_mean(values, seed);
}

MCEstimate beta0(const Germ& germ, const SubspaceSample& subspace, const std::vector<double>& v,
                 const ScaleSchedule& sched, int n_inner, uint64_t seed) {
    std::vector<std::vector<double>> dirs = subspace.frame;
    dirs.push_back(v);
    Germ sliced = slice_germ(germ, dirs);
    const int m = sliced.n;
    Polynomial f_slice = Polynomial::variable(m, m - 1);  // v* in slice coordinates

    Rng rng(seed);
    std::vector<double> values;
    values.reserve(static_cast<size_t>(n_inner));
    int resampled = 0;
    while (static_cast<int>(values.size()) < n_inner) {
        DirectionSample w = draw_direction(m, rng);
        try {
            IndexSums sums = index_sums(sliced, f_slice, linear_form(w.v), sched);
            values.push_back(0.5 * static_cast<double>(sums.i_plus + sums.i_minus));
        } catch (const DegenerateConfiguration&) {
            if (++resampled > std::max(10, n_inner)) throw;
        } catch (const UnstableEuler&) {
            if (++resampled > std::max(10, n_inner))
                throw DegenerateConfiguration("unstable chi in beta0 slice");
        }
    }
    return mc_mean(values, seed);
}

MCEstimate density(const Germ& germ, const ScaleSchedule& sched) {
    const int n = germ.n;
    const int d = germ.dim();
    if (d < 1 || d > 2) throw Error("density: dim X must be 1 or 2");
    const int codim = n - d;
    const double eps = sched.epsilon;

    // top-dimensional strata carry the d-measure
    std::vector<const Stratum*> tops;
    for (const auto& st : germ.strata)
        if (st.dim == d) tops.push_back(&st);
    for (const auto* st : tops)
        if (codim > 0 && st->equalities.size() != static_cast<size_t>(codim))
            throw Error("density: top strata must be cut out by codim-many equations");

    struct StratumData {
        std::vector<CompiledFunc> eqs;
        std::vector<CompiledFunc> ineqs;
        std::vector<double> hess_bound;
    };
    std::vector<StratumData> data;
    Box bbox = Box::cube(n, -1.05 * eps, 1.05 * eps);
    for (const auto* st : tops) {
        StratumData sd;
        for (const auto& p : st->equalities) {
            CompiledFunc cf(p);
            // Frobenius bound on the Hessian over the working box
            double hb = 0.0;
            for (int i = 0; i < n; ++i) {
                auto gi = gradient(p.derivative(i));
                for (const auto& gij : gi) {
                    Interval r = CompiledPoly(gij).eval(bbox);
                    hb += r.mag() * r.mag();
                }
            }
            sd.hess_bound.push_back(std::sqrt(hb));
            sd.eqs.push_back(std::move(cf));
        }
        for (const auto& p : st->inequalities) sd.ineqs.emplace_back(p);
        data.push_back(std::move(sd));
    }

    auto density_at = [&](double h) -> double {
        const double w = 2.0 * h;  // first-order band half-width
        int64_t cells = static_cast<int64_t>(std::ceil(2.0 * (eps + 2.0 * h) / h));
        std::vector<double> x(static_cast<size_t>(n));
        std::vector<int64_t> idx(static_cast<size_t>(n), 0);
        long long count = 0;
        while (true) {
            double r2 = 0.0;
            for (int i = 0; i < n; ++i) {
                x[static_cast<size_t>(i)] = -(eps + 2.0 * h) + (static_cast<double>(idx[static_cast<size_t>(i)]) + 0.5) * h;
                r2 += x[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
            }
            if (r2 <= eps * eps) {
                for (const auto& sd : data) {
                    bool in_band = true;
                    for (size_t e = 0; e < sd.eqs.size() && in_band; ++e) {
                        double val = std::fabs(sd.eqs[e].f.eval(x));
                        double gn = 0.0;
                        for (const auto& gi : sd.eqs[e].grad) {
                            double t = gi.eval(x);
                            gn += t * t;
                        }
                        gn = std::sqrt(gn);
                        if (val > w * gn + 4.0 * h * h * sd.hess_bound[e]) in_band = false;
                    }
                    for (const auto& q : sd.ineqs) {
                        if (!in_band) break;
                        if (q.f.eval(x) < -w * q.gradient_norm_bound(bbox)) in_band = false;
                    }
                    if (in_band) { ++count; break; }
                }
            }
            int axis = 0;
            while (axis < n) {
                if (++idx[static_cast<size_t>(axis)] < cells) break;
                idx[static_cast<size_t>(axis)] = 0;
                ++axis;
            }
            if (axis == n) break;
        }
        double vol = static_cast<double>(count) * std::pow(h, n);
        double tube = codim == 0 ? 1.0 : constants(codim).b_k * std::pow(w, codim);
        double measure = vol / tube;
        return measure / (constants(d).b_k * std::pow(eps, d));
    };

    double h1 = n <= 2 ? eps / 64.0 : eps / 16.0;
    double d1 = density_at(h1);
    double d2 = density_at(h1 / 2.0);
    double d3 = density_at(h1 / 4.0);
    double r12 = 2.0 * d2 - d1;
    double r23 = 2.0 * d3 - d2;
    double err = std::fabs(r23 - r12);
    if (err > 0.02 * std::max(1.0, std::fabs(r23)) + 1e-3)
        throw Error("density: non-convergent extrapolation");
    MCEstimate est;
    est.mean = r23;
    est.stderr_ = err + std::fabs(r23) / 60.0;  // 3 sigma ~ 5%
    est.n = 3;
    est.seed = 0;
    return est;
}

VerificationReport check_kinematic(const Germ& germ, const ScaleSchedule& sched,
                                   const CheckContext& ctx) {
    auto t0 = Clock::now();
    VerificationReport rep = base_report("kinematic", germ, sched, ctx);
    const int k = ctx.k;
    try {
        if (k < 1 || k > germ.n) throw Error("kinematic: need 1 <= k <= n");
        const int n_inner = 8;
        const int n_outer = std::max(24, ctx.n_samples / n_inner);

        Rng rng(ctx.seed);
        std::vector<double> values;
        values.reserve(static_cast<size_t>(n_outer));
        DirectionBudget budget{n_outer};
        while (static_cast<int>(values.size()) < n_outer) {
            SubspaceSample sub = draw_subspace(germ.n, germ.n - k, rng);
            std::vector<double> coeff(static_cast<size_t>(k));
            double nn = 0.0;
            while (nn < 1e-6) {
                nn = 0.0;
                for (auto& c : coeff) c = rng.gaussian();
                for (double c : coeff) nn += c * c;
                nn = std::sqrt(nn);
            }
            std::vector<double> v(static_cast<size_t>(germ.n), 0.0);
            for (int j = 0; j < k; ++j)
                for (int i = 0; i < germ.n; ++i)
                    v[static_cast<size_t>(i)] += coeff[static_cast<size_t>(j)] / nn *
                                                 sub.complement[static_cast<size_t>(j)][static_cast<size_t>(i)];
            uint64_t sub_seed = rng.raw();
            try {
                MCEstimate bp = beta0(germ, sub, v, sched, n_inner, sub_seed);
                MCEstimate bm = beta0(germ, sub, negate(v), sched, n_inner, sub_seed ^ 0x5851f42d4c957f2dULL);
                values.push_back(0.5 * (bp.mean + bm.mean));
            } catch (const DegenerateConfiguration& e) {
                budget.note_resample(e.what(), &rep.notes);
            } catch (const UnstableEuler& e) {
                if (ctx.strict_unstable) throw;
                budget.note_resample(e.what(), &rep.notes);
            }
        }
        MCEstimate beta_mean = mc_mean(values, ctx.seed);
        MCEstimate sig_k = sigma(germ, k, sched, ctx.n_samples, ctx.seed);
        MCEstimate sig_k1 = k + 1 <= germ.n ? sigma(germ, k + 1, sched, ctx.n_samples, ctx.seed)
                                            : MCEstimate{0.0, 0.0, 1, ctx.seed};
        rep.lhs = sig_k.mean - sig_k1.mean;
        rep.stderr_lhs = sig_k.stderr_ + sig_k1.stderr_;
        rep.rhs = beta_mean.mean;
        rep.stderr_rhs = beta_mean.stderr_;
        rep.resampled = budget.resampled;
        bool ok = std::fabs(rep.lhs - rep.rhs) <= 3.0 * (rep.stderr_lhs + rep.stderr_rhs) + 1e-12;
        rep.notes.push_back("sigma_k = " + std::to_string(sig_k.mean) + " +- " + std::to_string(sig_k.stderr_));
        rep.notes.push_back("sigma_{k+1} = " + std::to_string(sig_k1.mean) + " +- " + std::to_string(sig_k1.stderr_));
        rep.notes.push_back("int beta0 = " + std::to_string(beta_mean.mean) + " +- " + std::to_string(beta_mean.stderr_));
        if (k == germ.dim()) {
            MCEstimate dens = density(germ, sched);
            rep.notes.push_back("density = " + std::to_string(dens.mean) + " +- " + std::to_string(dens.stderr_));
            ok = ok && std::fabs(dens.mean - rep.rhs) <= 3.0 * (dens.stderr_ + rep.stderr_rhs) + 1e-12;
            ok = ok && std::fabs(dens.mean - rep.lhs) <= 3.0 * (dens.stderr_ + rep.stderr_lhs) + 1e-12;
        }
        rep.pass = ok;
    } catch (const std::exception& e) {
        rep.error = e.what();
        rep.pass = false;
    }
    rep.wall_ms = elapsed_ms(t0);
    return rep;
}

namespace {

// E[chi(Lk(X ∩ H))] over Haar H in G_n^j; j = n is deterministic, j = 0 empty.
MCEstimate mean_link_chi(const Germ& germ, int j, const ScaleSchedule& sched, int n_samples,
                         uint64_t seed) {
    if (j < 0 || j > germ.n) throw Error("mean_link_chi: bad dimension");
    if (j == 0) return MCEstimate{0.0, 0.0, 1, seed};
    if (j == germ.n) {
        long long chi = checked_chi(link_region(germ, sched.epsilon), link_schedule(sched.epsilon));
        return MCEstimate{static_cast<double>(chi), 0.0, 1, seed};
    }
    Rng rng(seed);
    std::vector<double> values;
    values.reserve(static_cast<size_t>(n_samples));
    int resampled = 0;
    while (static_cast<int>(values.size()) < n_samples) {
        SubspaceSample sub = draw_subspace(germ.n, j, rng);
        try {
            RegionSpec region = link_region(germ, sched.epsilon);
            AffineFrame frame;
            frame.base.assign(static_cast<size_t>(germ.n), 0.0);
            frame.dirs = sub.frame;
            region.frame = frame;
            values.push_back(static_cast<double>(checked_chi(region, link_schedule(sched.epsilon))));
        } catch (const DegenerateConfiguration&) {
            if (++resampled > std::max(10, n_samples / 20))
                throw Error("mean_link_chi: too many degenerate subspaces");
        } catch (const UnstableEuler&) {
            if (++resampled > std::max(10, n_samples / 20))
                throw Error("mean_link_chi: too many unstable subspaces");
        }
    }
    return mc_mean(values, seed);
}

}  // namespace

VerificationReport check_sigma_relation(const Germ& germ, const ScaleSchedule& sched,
                                        const CheckContext& ctx) {
    auto t0 = Clock::now();
    VerificationReport rep = base_report("sigma_relation", germ, sched, ctx);
    try {
        const int n = germ.n;
        std::vector<MCEstimate> sig(static_cast<size_t>(n) + 2);
        for (int k = 0; k <= n; ++k)
            sig[static_cast<size_t>(k)] = sigma(germ, k, sched, ctx.n_samples, ctx.seed);
        sig[static_cast<size_t>(n) + 1] = MCEstimate{0.0, 0.0, 1, ctx.seed};

        bool ok = true;
        // sigma_k = 1 for k <= d_0
        for (int k = 0; k <= germ.d0(); ++k) {
            const auto& s = sig[static_cast<size_t>(k)];
            if (std::fabs(s.mean - 1.0) > 3.0 * s.stderr_ + 1e-12) {
                ok = false;
                rep.notes.push_back("sigma_" + std::to_string(k) + " = " + std::to_string(s.mean) +
                                    " but k <= d0 = " + std::to_string(germ.d0()));
            }
        }
        // link expression: sigma_k = 1/2 E[chi(Lk(X∩L))] + 1/2 E[chi(Lk(X∩H))]
        const int n_link = std::max(32, ctx.n_samples / 4);
        for (int k = 1; k <= n; ++k) {
            MCEstimate el = mean_link_chi(germ, n - k + 1, sched, n_link, ctx.seed + 11 * static_cast<uint64_t>(k));
            MCEstimate eh = mean_link_chi(germ, n - k, sched, n_link, ctx.seed + 13 * static_cast<uint64_t>(k));
            double via_links = 0.5 * el.mean + 0.5 * eh.mean;
            double se = 0.5 * el.stderr_ + 0.5 * eh.stderr_;
            const auto& s = sig[static_cast<size_t>(k)];
            rep.notes.push_back("sigma_" + std::to_string(k) + ": direct " + std::to_string(s.mean) +
                                " +- " + std::to_string(s.stderr_) + ", links " + std::to_string(via_links) +
                                " +- " + std::to_string(se));
            if (std::fabs(s.mean - via_links) > 3.0 * (s.stderr_ + se) + 1e-12) {
                ok = false;
                rep.notes.back() += "  [MISMATCH]";
            }
            if (k == 1) {
                rep.lhs = s.mean;
                rep.stderr_lhs = s.stderr_;
                rep.rhs = via_links;
                rep.stderr_rhs = se;
            }
        }
        rep.pass = ok;
    } catch (const std::exception& e) {
        rep.error = e.what();
        rep.pass = false;
    }
    rep.wall_ms = elapsed_ms(t0);
    return rep;
}

VerificationReport check_curv_and_link(const Germ& germ, const ScaleSchedule& sched,
                                       const CheckContext& ctx) {
    auto t0 = Clock::now();
    VerificationReport rep = base_report("curv_and_link", germ, sched, ctx);
    try {
        const int n = germ.n;
        std::vector<MCEstimate> sig(static_cast<size_t>(n) + 2);
        for (int k = 0; k <= n; ++k)
            sig[static_cast<size_t>(k)] = sigma(germ, k, sched, ctx.n_samples, ctx.seed);
        sig[static_cast<size_t>(n) + 1] = MCEstimate{0.0, 0.0, 1, ctx.seed};

        const int n_link = std::max(32, ctx.n_samples / 4);
        bool ok = true;
        double worst = -1.0;
        for (int k = 0; k <= n; ++k) {
            double cl = 0.0, cl_se = 0.0;
            if (k == 0) {
                MCEstimate lkx = mean_link_chi(germ, n, sched, 1, ctx.seed);
                MCEstimate eh = mean_link_chi(germ, n - 1, sched, n_link, ctx.seed + 101);
                cl = 1.0 - 0.5 * lkx.mean - 0.5 * eh.mean;
                cl_se = 0.5 * eh.stderr_;
            } else if (k <= n - 2) {
                MCEstimate eh = mean_link_chi(germ, n - k - 1, sched, n_link, ctx.seed + 101 + 7 * static_cast<uint64_t>(k));
                MCEstimate el = mean_link_chi(germ, n - k + 1, sched, n_link, ctx.seed + 211 + 7 * static_cast<uint64_t>(k));
                cl = -0.5 * eh.mean + 0.5 * el.mean;
                cl_se = 0.5 * (eh.stderr_ + el.stderr_);
            } else if (k == n - 1) {
                MCEstimate eh = mean_link_chi(germ, 2, sched, n_link, ctx.seed + 307);
                cl = 0.5 * eh.mean;
                cl_se = 0.5 * eh.stderr_;
            } else {
                MCEstimate eh = mean_link_chi(germ, 1, sched, n_link, ctx.seed + 401);
                cl = 0.5 * eh.mean;
                cl_se = 0.5 * eh.stderr_;
            }
            double via_sigma = k < n ? sig[static_cast<size_t>(k)].mean - sig[static_cast<size_t>(k) + 1].mean
                                     : sig[static_cast<size_t>(n)].mean;
            double sig_se = k < n ? sig[static_cast<size_t>(k)].stderr_ + sig[static_cast<size_t>(k) + 1].stderr_
                                  : sig[static_cast<size_t>(n)].stderr_;
            double diff = std::fabs(cl - via_sigma);
            rep.notes.push_back("k=" + std::to_string(k) + ": curv-link " + std::to_string(cl) +
                                " +- " + std::to_string(cl_se) + ", sigma-diff " + std::to_string(via_sigma) +
                                " +- " + std::to_string(sig_se));
            if (diff > 3.0 * (cl_se + sig_se) + 1e-12) {
                ok = false;
                rep.notes.back() += "  [MISMATCH]";
            }
            if (diff > worst) {
                worst = diff;
                rep.lhs = cl;
                rep.stderr_lhs = cl_se;
                rep.rhs = via_sigma;
                rep.stderr_rhs = sig_se;
            }
        }
        rep.pass = ok;
    } catch (const std::exception& e) {
        rep.error = e.what();
        rep.pass = false;
    }
    rep.wall_ms = elapsed_ms(t0);
    return rep;
}

}  // namespace singulab
