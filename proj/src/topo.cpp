#include "singulab/topo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace singulab {

RegionSpec RegionSpec::single(int dim, std::vector<Polynomial> eqs,
                              std::vector<Polynomial> ineqs,
                              std::optional<BallConstraint> ball) {
    RegionSpec r;
    r.dim = dim;
    r.clauses.push_back(Clause{std::move(eqs), std::move(ineqs)});
    r.ball = std::move(ball);
    return r;
}

void RegionSpec::validate() const {
    for (const auto& cl : clauses) {
        for (const auto& p : cl.equalities)
            if (p.nvars() != dim) throw Error("region: equality arity mismatch");
        for (const auto& p : cl.inequalities)
            if (p.nvars() != dim) throw Error("region: inequality arity mismatch");
    }
    if (ball) {
        if (static_cast<int>(ball->center.size()) != dim) throw Error("region: ball center arity");
        if (!(ball->radius > 0.0)) throw Error("region: ball radius must be positive");
    }
    if (frame) {
        frame->validate();
        if (frame->ambient() != dim) throw Error("region: frame ambient mismatch");
    }
}

RegionSpec RegionSpec::reduced(bool* empty_slice) const {
    if (empty_slice) *empty_slice = false;
    validate();
    if (!frame) return *this;
    const AffineFrame& fr = *frame;
    RegionSpec out;
    out.dim = fr.m();
    for (const auto& cl : clauses) {
        Clause c;
        for (const auto& p : cl.equalities) c.equalities.push_back(restrict_affine(p, fr));
        for (const auto& p : cl.inequalities) c.inequalities.push_back(restrict_affine(p, fr));
        out.clauses.push_back(std::move(c));
    }
    if (ball) {
        // |q + sum u_j e_j - c|^2 <= r^2 is a ball in slice coordinates
        const int m = fr.m();
        std::vector<double> qc(fr.base.size());
        double qc2 = 0.0;
        for (size_t i = 0; i < qc.size(); ++i) {
            qc[i] = fr.base[i] - ball->center[i];
            qc2 += qc[i] * qc[i];
        }
        std::vector<double> ustar(static_cast<size_t>(m));
        double proj2 = 0.0;
        for (int j = 0; j < m; ++j) {
            double dot = 0.0;
            for (size_t i = 0; i < qc.size(); ++i) dot += qc[i] * fr.dirs[static_cast<size_t>(j)][i];
            ustar[static_cast<size_t>(j)] = -dot;
            proj2 += dot * dot;
        }
        double r2 = ball->radius * ball->radius - qc2 + proj2;
        if (r2 <= 0.0) {
            if (empty_slice) *empty_slice = true;
            out.clauses.clear();
            BallConstraint bc;
            bc.center = ustar;
            bc.radius = 1.0;
            bc.sphere = ball->sphere;
            out.ball = bc;
            return out;
        }
        BallConstraint bc;
        bc.center = ustar;
        bc.radius = std::sqrt(r2);
        bc.sphere = ball->sphere;
        out.ball = bc;
    }
    return out;
}

namespace {

Polynomial ball_polynomial(const BallConstraint& b, int dim) {
    // r^2 - |x - c|^2 (>= 0 inside, = 0 on the sphere)
    Polynomial p = Polynomial::constant(dim, rational_from_double(b.radius) * rational_from_double(b.radius));
    for (int i = 0; i < dim; ++i) {
        Polynomial d = Polynomial::variable(dim, i) -
                       Polynomial::constant(dim, rational_from_double(b.center[static_cast<size_t>(i)]));
        p -= d * d;
    }
    return p;
}

struct CompiledConstraint {
    CompiledFunc func;
    bool equality;  // equality: range must meet [-tau, tau]; else [-tau, inf)
    double grad_bound = 0.0;
};

struct CompiledClause {
    std::vector<CompiledConstraint> constraints;
};

struct CompiledRegion {
    int m = 0;
    std::vector<CompiledClause> clauses;
    std::vector<double> center;
    double radius = 0.0;

    bool clause_passes(const CompiledClause& cl, const Box& box, double h, bool precise) const {
        for (const auto& c : cl.constraints) {
            Interval range = precise ? c.func.enclose(box) : c.func.f.eval(box);
            double tau = c.grad_bound * h;
            if (c.equality) {
                if (range.lo > tau || range.hi < -tau) return false;
            } else {
                if (range.hi < -tau) return false;
            }
        }
        return true;
    }

    bool passes(const Box& box, double h, bool precise) const {
        for (const auto& cl : clauses)
            if (clause_passes(cl, box, h, precise)) return true;
        return false;
    }
};

CompiledRegion compile_region(const RegionSpec& reduced) {
    if (!reduced.ball) throw Error("euler/cover: region must carry a ball constraint");
    CompiledRegion out;
    out.m = reduced.dim;
    out.center = reduced.ball->center;
    out.radius = reduced.ball->radius;
    Polynomial bp = ball_polynomial(*reduced.ball, reduced.dim);
    for (const auto& cl : reduced.clauses) {
        CompiledClause cc;
        for (const auto& p : cl.equalities)
            cc.constraints.push_back({CompiledFunc(p), true});
        for (const auto& p : cl.inequalities)
            cc.constraints.push_back({CompiledFunc(p), false});
        cc.constraints.push_back({CompiledFunc(bp), reduced.ball->sphere});
        out.clauses.push_back(std::move(cc));
    }
    return out;
}

void update_grad_bounds(CompiledRegion* region, const Box& bbox) {
    for (auto& cl : region->clauses)
        for (auto& c : cl.constraints) c.grad_bound = c.func.gradient_norm_bound(bbox);
}

struct GridLevel {
    double h = 0.0;
    std::vector<double> origin;       // ambient coordinate of index 0 (per axis)
    std::array<int64_t, 4> lo{}, hi{};  // active index ranges (half-open)
    int m = 0;

    Box range_box(const std::array<int64_t, 4>& a, const std::array<int64_t, 4>& b) const {
        Box box;
        box.coords.resize(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i)
            box.coords[static_cast<size_t>(i)] =
                Interval(origin[static_cast<size_t>(i)] + h * static_cast<double>(a[static_cast<size_t>(i)]),
                         origin[static_cast<size_t>(i)] + h * static_cast<double>(b[static_cast<size_t>(i)]));
        return box;
    }
};

using Cell = std::array<int64_t, 4>;

void enumerate_rec(const CompiledRegion& region, const GridLevel& level,
                   std::array<int64_t, 4> lo, std::array<int64_t, 4> hi,
                   std::vector<Cell>* out, size_t budget) {
    Box box = level.range_box(lo, hi);
    bool leaf = true;
    for (int i = 0; i < level.m; ++i)
        if (hi[static_cast<size_t>(i)] - lo[static_cast<size_t>(i)] > 1) leaf = false;
    if (!region.passes(box, level.h, leaf)) return;
    if (leaf) {
        if (out->size() >= budget) throw Error("euler: cell budget exceeded");
        out->push_back(lo);
        return;
    }
    int axis = 0;
    int64_t wmax = 0;
    for (int i = 0; i < level.m; ++i) {
        int64_t w = hi[static_cast<size_t>(i)] - lo[static_cast<size_t>(i)];
        if (w > wmax) { wmax = w; axis = i; }
    }
    int64_t mid = lo[static_cast<size_t>(axis)] + wmax / 2;
    std::array<int64_t, 4> ahi = hi, blo = lo;
    ahi[static_cast<size_t>(axis)] = mid;
    blo[static_cast<size_t>(axis)] = mid;
    enumerate_rec(region, level, lo, ahi, out, budget);
    enumerate_rec(region, level, blo, hi, out, budget);
}

std::vector<Cell> enumerate_cells(const CompiledRegion& region, const GridLevel& level, size_t budget) {
    std::vector<Cell> cells;
    bool nonempty = false;
    for (int i = 0; i < level.m; ++i)
        if (level.hi[static_cast<size_t>(i)] > level.lo[static_cast<size_t>(i)]) nonempty = true;
    if (!nonempty) return cells;
    enumerate_rec(region, level, level.lo, level.hi, &cells, budget);
    std::sort(cells.begin(), cells.end());
    return cells;
}

uint64_t pack_key(const std::array<int64_t, 4>& d, int m) {
    uint64_t key = 0;
    for (int i = 0; i < m; ++i)
        key = (key << 16) | static_cast<uint64_t>(d[static_cast<size_t>(i)] & 0xffff);
    return key;
}

// chi of the closed cubical complex spanned by the top cells: faces are
// encoded in doubled coordinates (odd entry = spanning interval on that axis).
long long chi_of_cells(const std::vector<Cell>& cells, int m, const std::array<int64_t, 4>& base) {
    std::unordered_set<uint64_t> faces;
    faces.reserve(cells.size() * (m == 1 ? 3u : m == 2 ? 9u : m == 3 ? 27u : 81u));
    long long chi = 0;
    const int nfaces = static_cast<int>(std::pow(3, m));
    for (const auto& c : cells) {
        std::array<int64_t, 4> d{};
        for (int i = 0; i < m; ++i)
            d[static_cast<size_t>(i)] = 2 * (c[static_cast<size_t>(i)] - base[static_cast<size_t>(i)]) + 1;
        for (int f = 0; f < nfaces; ++f) {
            std::array<int64_t, 4> v = d;
            int rem = f;
            int odd = 0;
            for (int i = 0; i < m; ++i) {
                int choice = rem % 3;  // 0: low vertex, 1: span, 2: high vertex
                rem /= 3;
                v[static_cast<size_t>(i)] += choice - 1;
                if (choice == 1) ++odd;
            }
            if (faces.insert(pack_key(v, m)).second) chi += (odd % 2 == 0) ? 1 : -1;
        }
    }
    return chi;
}

struct CubicalLevels {
    CompiledRegion region;
    GridLevel level;
    double radius;

    void init(const RegionSpec& reduced, double h0) {
        region = compile_region(reduced);
        radius = region.radius;
        level.m = region.m;
        level.h = h0;
        level.origin.resize(static_cast<size_t>(region.m));
        int64_t cells = static_cast<int64_t>(std::ceil(2.0 * (radius + 2.0 * h0) / h0));
        for (int i = 0; i < region.m; ++i) {
            level.origin[static_cast<size_t>(i)] = region.center[static_cast<size_t>(i)] - (radius + 2.0 * h0);
            level.lo[static_cast<size_t>(i)] = 0;
            level.hi[static_cast<size_t>(i)] = cells;
        }
    }

    std::vector<Cell> run_level(size_t budget) {
        update_grad_bounds(&region, level.range_box(level.lo, level.hi));
        return enumerate_cells(region, level, budget);
    }

    // halve h, double the index ranges, then shrink to the retained hull
    void refine(const std::vector<Cell>& retained) {
        level.h *= 0.5;
        for (int i = 0; i < level.m; ++i) {
            level.lo[static_cast<size_t>(i)] *= 2;
            level.hi[static_cast<size_t>(i)] *= 2;
        }
        if (retained.empty()) return;
        std::array<int64_t, 4> rlo, rhi;
        rlo.fill(std::numeric_limits<int64_t>::max());
        rhi.fill(std::numeric_limits<int64_t>::min());
        for (const auto& c : retained)
            for (int i = 0; i < level.m; ++i) {
                rlo[static_cast<size_t>(i)] = std::min(rlo[static_cast<size_t>(i)], c[static_cast<size_t>(i)]);
                rhi[static_cast<size_t>(i)] = std::max(rhi[static_cast<size_t>(i)], c[static_cast<size_t>(i)] + 1);
            }
        for (int i = 0; i < level.m; ++i) {
            level.lo[static_cast<size_t>(i)] = std::max(level.lo[static_cast<size_t>(i)], 2 * rlo[static_cast<size_t>(i)] - 4);
            level.hi[static_cast<size_t>(i)] = std::min(level.hi[static_cast<size_t>(i)], 2 * rhi[static_cast<size_t>(i)] + 4);
        }
    }
};

// ---------------------------------------------------------------------------
// Certified point counting for regions that are zero dimensional by equation
// count. Returns nullopt when no equation subset isolates cleanly (the caller
// then falls back to the cubical estimate).
// ---------------------------------------------------------------------------

double poly_scale(const Polynomial& p) {
    double s = 0.0;
    for (const auto& [e, c] : p.terms()) s += std::fabs(c.get_d());
    return std::max(1.0, s);
}

struct PointCount {
    std::vector<std::vector<double>> points;
};

bool region_zero_dimensional(const RegionSpec& r) {
    if (r.dim < 1 || r.clauses.empty()) return false;
    if (!r.ball) return false;
    for (const auto& cl : r.clauses) {
        int eqs = static_cast<int>(cl.equalities.size()) + (r.ball->sphere ? 1 : 0);
        if (eqs < r.dim) return false;
    }
    return true;
}

std::optional<std::vector<std::vector<double>>> clause_points(
    const Clause& cl, const BallConstraint& ball, int m) {
    std::vector<Polynomial> eqs = cl.equalities;
    Polynomial bp = ball_polynomial(ball, m);
    if (ball.sphere) eqs.push_back(bp);

    Box domain;
    domain.coords.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        double c = ball.center[static_cast<size_t>(i)];
        domain.coords[static_cast<size_t>(i)] = Interval(c - 1.02 * ball.radius, c + 1.02 * ball.radius);
    }

    const int total = static_cast<int>(eqs.size());
    std::vector<int> combo(static_cast<size_t>(m));
    std::vector<int> idx(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) idx[static_cast<size_t>(i)] = i;

    auto next_combo = [&]() -> bool {
        int i = m - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == total - m + i) --i;
        if (i < 0) return false;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < m; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
        return true;
    };

    do {
        std::vector<Polynomial> sub;
        for (int i = 0; i < m; ++i) sub.push_back(eqs[static_cast<size_t>(idx[static_cast<size_t>(i)])]);
        SquareSystem sys(sub);
        SolveOptions opts;
        SolveReport rep = isolate_roots(sys, domain, opts);
        if (!rep.complete()) continue;

        std::vector<std::vector<double>> accepted;
        for (auto& root : rep.roots) {
            CertifiedRoot tight = refine_root(root, sys, 1e-12);
            bool include = true;
            // residual test on the equations left out of the subsystem
            for (int j = 0; j < total && include; ++j) {
                if (std::find(idx.begin(), idx.end(), j) != idx.end()) continue;
                Interval r = eval_interval(eqs[static_cast<size_t>(j)], tight.box);
                double t = 1e-8 * poly_scale(eqs[static_cast<size_t>(j)]);
                if (r.lo > t || r.hi < -t) include = false;
                else if (r.lo < -t || r.hi > t)
                    throw DegenerateConfiguration("ambiguous residual in point count");
            }
            for (const auto& q : cl.inequalities) {
                if (!include) break;
                Interval r = eval_interval(q, tight.box);
                double t = 1e-8 * poly_scale(q);
                if (r.hi < -t) include = false;
                else if (r.lo < t)
                    throw DegenerateConfiguration("point on inequality frontier");
            }
            if (include && !ball.sphere) {
                Interval r = eval_interval(bp, tight.box);
                double t = 1e-8 * poly_scale(bp);
                if (r.hi < -t) include = false;
                else if (r.lo < t)
                    throw DegenerateConfiguration("point on ball boundary");
            }
            if (include) accepted.push_back(tight.box.midpoint());
        }
        return accepted;
    } while (next_combo());

    return std::nullopt;
}

std::optional<PointCount> try_point_count(const RegionSpec& reduced) {
    if (!region_zero_dimensional(reduced)) return std::nullopt;
    PointCount pc;
    for (const auto& cl : reduced.clauses) {
        auto pts = clause_points(cl, *reduced.ball, reduced.dim);
        if (!pts) return std::nullopt;
        for (auto& p : *pts) {
            bool dup = false;
            for (const auto& q : pc.points) {
                double d = 0.0;
                for (size_t i = 0; i < p.size(); ++i) d = std::max(d, std::fabs(p[i] - q[i]));
                if (d <= 1e-7) { dup = true; break; }
            }
            if (!dup) pc.points.push_back(std::move(p));
        }
    }
    return pc;
}

// Zero-variable region after slicing: every constraint is a constant.
EulerEstimate point_region_chi(const RegionSpec& reduced) {
    EulerEstimate est;
    est.method = EulerEstimate::Method::kPointEval;
    est.stable = true;
    bool inside = false;
    bool ball_ok = true;
    if (reduced.ball) {
        // center of the 0-dim "ball" is the residual offset of the slice point
        double d2 = 0.0;
        for (double c : reduced.ball->center) d2 += c * c;
        double r = reduced.ball->radius;
        ball_ok = reduced.ball->sphere ? std::fabs(std::sqrt(d2) - r) < 1e-12
                                       : d2 <= r * r + 1e-12;
    }
    for (const auto& cl : reduced.clauses) {
        bool ok = ball_ok;
        for (const auto& p : cl.equalities)
            if (!p.is_constant() || p.constant_term() != 0) ok = false;
        for (const auto& p : cl.inequalities)
            if (!p.is_constant() || p.constant_term() < 0) ok = false;
        if (ok) { inside = true; break; }
    }
    est.value = inside ? 1 : 0;
    est.trace = {est.value, est.value};
    return est;
}

}  // namespace

Box CubicalApproximation::cell_box(size_t i) const {
    Box b;
    b.coords.resize(static_cast<size_t>(dim));
    for (int a = 0; a < dim; ++a) {
        double lo = origin[static_cast<size_t>(a)] + h * static_cast<double>(cells[i][static_cast<size_t>(a)]);
        b.coords[static_cast<size_t>(a)] = Interval(lo, lo + h);
    }
    return b;
}

CubicalApproximation cover(const RegionSpec& region, double h) {
    bool empty_slice = false;
    RegionSpec reduced = region.reduced(&empty_slice);
    if (reduced.dim == 0) throw Error("cover: zero dimensional slice");
    if (!reduced.ball) throw Error("cover: region must be compact (ball constraint)");
    if (h < 1e-6 * reduced.ball->radius) throw Error("cover: resolution below 1e-6 * radius");

    CubicalApproximation out;
    out.dim = reduced.dim;
    out.h = h;
    if (empty_slice) {
        out.origin.assign(static_cast<size_t>(reduced.dim), 0.0);
        return out;
    }
    CubicalLevels lv;
    lv.init(reduced, h);
    out.origin = lv.level.origin;
    auto cells = lv.run_level(10'000'000);
    out.cells.reserve(cells.size());
    for (const auto& c : cells) {
        std::array<int32_t, 4> cc{};
        for (int i = 0; i < reduced.dim; ++i) cc[static_cast<size_t>(i)] = static_cast<int32_t>(c[static_cast<size_t>(i)]);
        out.cells.push_back(cc);
    }
    for (const auto& cl : lv.region.clauses)
        for (const auto& c : cl.constraints)
            if (c.equality) out.tau.push_back(c.grad_bound * h);
    return out;
}

EulerEstimate euler(const RegionSpec& region, const EulerSchedule& schedule) {
    bool empty_slice = false;
    RegionSpec reduced = region.reduced(&empty_slice);
    if (empty_slice) {
        EulerEstimate est;
        est.value = 0;
        est.trace = {0, 0};
        est.stable = true;
        est.method = EulerEstimate::Method::kPointEval;
        return est;
    }
    if (reduced.dim == 0) return point_region_chi(reduced);
    if (!reduced.ball) throw Error("euler: region must be compact (ball constraint)");

    if (auto pc = try_point_count(reduced)) {
        EulerEstimate est;
        est.value = static_cast<long long>(pc->points.size());
        est.trace = {est.value, est.value};
        est.stable = true;
        est.method = EulerEstimate::Method::kRootCount;
        return est;
    }

    const double radius = reduced.ball->radius;
    const double h0 = schedule.h0 > 0.0 ? schedule.h0 : radius / 8.0;
    const double h_trust = schedule.h_trust > 0.0 ? schedule.h_trust : h0 / 8.0;
    if (h_trust < 1e-6 * radius)
        throw Error("euler: trusted resolution below 1e-6 * radius");
    // keep the finest level above the cover's resolution floor
    int max_levels = schedule.max_refinements;
    while (max_levels > 0 && h0 / std::pow(2.0, max_levels) < 1e-6 * radius) --max_levels;

    CubicalLevels lv;
    lv.init(reduced, h0);
    EulerEstimate est;
    est.method = EulerEstimate::Method::kCubical;
    for (int level = 0; level <= max_levels; ++level) {
        auto cells = lv.run_level(schedule.cell_budget);
        if (cells.empty()) {
            // certified exclusion: the region is empty
            est.value = 0;
            est.trace.push_back(0);
            est.trace.push_back(0);
            est.stable = true;
            return est;
        }
        est.trace.push_back(chi_of_cells(cells, lv.level.m, lv.level.lo));
        size_t k = est.trace.size();
        if (k >= 2 && est.trace[k - 1] == est.trace[k - 2] &&
            lv.level.h <= h_trust * (1.0 + 1e-12)) {
            est.value = est.trace.back();
            est.stable = true;
            return est;
        }
        lv.refine(cells);
    }
    throw UnstableEuler("refinement budget exhausted", est.trace);
}

ComponentsResult components(const RegionSpec& region, double h) {
    bool empty_slice = false;
    RegionSpec reduced = region.reduced(&empty_slice);
    ComponentsResult out;
    if (empty_slice) return out;
    if (reduced.dim == 0) {
        EulerEstimate e = point_region_chi(reduced);
        out.count = static_cast<int>(e.value);
        if (out.count > 0) out.samples.push_back({});
        return out;
    }
    if (!reduced.ball) throw Error("components: region must be compact");

    if (auto pc = try_point_count(reduced)) {
        out.count = static_cast<int>(pc->points.size());
        out.samples = pc->points;
        return out;
    }

    // cubical route: count components of the adjacency graph, requiring
    // agreement across one refinement
    std::vector<long long> trace;
    CubicalLevels lv;
    lv.init(reduced, h);
    std::vector<std::vector<double>> samples;
    for (int attempt = 0; attempt < 5; ++attempt) {
        auto cells = lv.run_level(3'000'000);
        std::unordered_map<uint64_t, int> id;
        id.reserve(cells.size());
        for (size_t i = 0; i < cells.size(); ++i) {
            std::array<int64_t, 4> local{};
            for (int a = 0; a < lv.level.m; ++a)
                local[static_cast<size_t>(a)] = cells[i][static_cast<size_t>(a)] - lv.level.lo[static_cast<size_t>(a)];
            id[pack_key(local, lv.level.m)] = static_cast<int>(i);
        }
        std::vector<int> parent(cells.size());
        for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
        std::function<int(int)> find = [&](int x) {
            while (parent[static_cast<size_t>(x)] != x) {
                parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
                x = parent[static_cast<size_t>(x)];
            }
            return x;
        };
        const int m = lv.level.m;
        const int nneigh = static_cast<int>(std::pow(3, m));
        for (size_t i = 0; i < cells.size(); ++i) {
            for (int f = 0; f < nneigh; ++f) {
                std::array<int64_t, 4> nb{};
                int rem = f;
                bool self = true;
                for (int a = 0; a < m; ++a) {
                    int d = rem % 3 - 1;
                    rem /= 3;
                    nb[static_cast<size_t>(a)] = cells[i][static_cast<size_t>(a)] + d - lv.level.lo[static_cast<size_t>(a)];
                    if (d != 0) self = false;
                }
                if (self) continue;
                auto it = id.find(pack_key(nb, m));
                if (it == id.end()) continue;
                int ra = find(static_cast<int>(i)), rb = find(it->second);
                if (ra != rb) parent[static_cast<size_t>(ra)] = rb;
            }
        }
        std::unordered_map<int, size_t> reps;
        samples.clear();
        for (size_t i = 0; i < cells.size(); ++i) {
            int r = find(static_cast<int>(i));
            if (reps.emplace(r, samples.size()).second) {
                Box b = lv.level.range_box(cells[i], {cells[i][0] + 1, cells[i][1] + 1, cells[i][2] + 1, cells[i][3] + 1});
                samples.push_back(b.midpoint());
            }
        }
        trace.push_back(static_cast<long long>(reps.size()));
        if (trace.size() >= 2 && trace[trace.size() - 1] == trace[trace.size() - 2]) {
            out.count = static_cast<int>(trace.back());
            out.samples = samples;
            return out;
        }
        lv.refine(cells);
    }
    throw UnstableEuler("component count did not stabilize", trace);
}

}  // namespace singulab
