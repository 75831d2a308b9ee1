#include "singulab/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <deque>

namespace singulab {

SquareSystem::SquareSystem(std::vector<Polynomial> eqs) : equations(std::move(eqs)) {
    if (equations.empty()) throw Error("square system: empty");
    const int n = equations.front().nvars();
    if (static_cast<int>(equations.size()) != n)
        throw Error("square system: equation count != variable count");
    for (const auto& e : equations)
        if (e.nvars() != n) throw Error("square system: mixed arities");
}

namespace {

struct Compiled {
    int m;
    std::vector<CompiledFunc> funcs;  // value + gradient row per equation

    explicit Compiled(const SquareSystem& sys) : m(sys.size()) {
        funcs.reserve(static_cast<size_t>(m));
        for (const auto& e : sys.equations) funcs.emplace_back(e);
    }

    bool excluded(const Box& b) const {
        for (const auto& f : funcs)
            if (!f.enclose(b).contains_zero()) return true;
        return false;
    }
};

enum class KrawczykOutcome { kNoRoot, kUnique, kContracted, kNoProgress };

// One Krawczyk step. On kUnique/kContracted, *out holds K(b) ∩ b.
KrawczykOutcome krawczyk_step(const Compiled& sys, const Box& b, Box* out) {
    const int m = sys.m;
    const std::vector<double> c = b.midpoint();
    const Box cbox = Box::point(c);

    Eigen::MatrixXd jc(m, m);
    std::vector<std::vector<Interval>> jint(static_cast<size_t>(m),
                                            std::vector<Interval>(static_cast<size_t>(m)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Interval e = sys.funcs[static_cast<size_t>(i)].grad[static_cast<size_t>(j)].eval(b);
            jint[static_cast<size_t>(i)][static_cast<size_t>(j)] = e;
            jc(i, j) = e.mid();
        }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(jc);
    if (!lu.isInvertible()) return KrawczykOutcome::kNoProgress;
    Eigen::MatrixXd y = lu.inverse();

    // K = c - Y F(c) + (I - Y J)(b - c)
    std::vector<Interval> fc(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) fc[static_cast<size_t>(i)] = sys.funcs[static_cast<size_t>(i)].f.eval(cbox);

    Box k;
    k.coords.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        Interval acc = Interval::point(c[static_cast<size_t>(i)]);
        for (int j = 0; j < m; ++j) acc = acc - y(i, j) * fc[static_cast<size_t>(j)];
        for (int j = 0; j < m; ++j) {
            Interval mij = (i == j ? Interval(1.0, 1.0) : Interval(0.0, 0.0));
            for (int l = 0; l < m; ++l)
                mij = mij - y(i, l) * jint[static_cast<size_t>(l)][static_cast<size_t>(j)];
            Interval dj = b.coords[static_cast<size_t>(j)] - Interval::point(c[static_cast<size_t>(j)]);
            acc = acc + mij * dj;
        }
        k.coords[static_cast<size_t>(i)] = acc;
    }

    bool strict = true;
    for (int i = 0; i < m; ++i)
        if (!k.coords[static_cast<size_t>(i)].strict_subset_of(b.coords[static_cast<size_t>(i)]))
            strict = false;

    Box inter;
    if (!intersect(k, b, &inter)) return KrawczykOutcome::kNoRoot;
    *out = inter;
    if (strict) return KrawczykOutcome::kUnique;
    if (inter.max_width() < 0.75 * b.max_width()) return KrawczykOutcome::kContracted;
    return KrawczykOutcome::kNoProgress;
}

Box inflate(const Box& b, double rel, double abs) {
    Box r = b;
    for (auto& c : r.coords) {
        double pad = rel * c.width() + abs;
        c.lo -= pad;
        c.hi += pad;
    }
    return r;
}

Box contract_to_tol(const Compiled& sys, Box b, double tol) {
    for (int it = 0; it < 80 && b.max_width() > tol; ++it) {
        Box next;
        KrawczykOutcome o = krawczyk_step(sys, b, &next);
        if (o == KrawczykOutcome::kNoRoot) break;  // cannot happen for a certified box
        if (o == KrawczykOutcome::kNoProgress) {
            // bisection-free stall: stop once no shrink
            if (next.max_width() >= 0.999 * b.max_width()) { b = next; break; }
        }
        if (next.max_width() >= 0.999 * b.max_width() && o != KrawczykOutcome::kUnique) { b = next; break; }
        b = next;
    }
    return b;
}

double residual_at(const Compiled& sys, const std::vector<double>& p) {
    double r = 0.0;
    for (const auto& f : sys.funcs) r = std::max(r, std::fabs(f.f.eval(p)));
    return r;
}

bool midpoint_less(const CertifiedRoot& a, const CertifiedRoot& b) {
    const auto ma = a.box.midpoint();
    const auto mb = b.box.midpoint();
    for (size_t i = 0; i < ma.size(); ++i) {
        if (ma[i] < mb[i]) return true;
        if (ma[i] > mb[i]) return false;
    }
    return false;
}

}  // namespace

SolveReport isolate_roots(const SquareSystem& sys, const Box& domain, const SolveOptions& opts) {
    if (domain.dim() != sys.nvars()) throw Error("isolate_roots: domain dimension mismatch");
    Compiled comp(sys);
    SolveReport report;

    struct Item { Box box; int depth; };
    std::vector<Item> stack;
    stack.push_back({domain, 0});

    const uint64_t kBoxBudget = 4'000'000;

    while (!stack.empty()) {
        Item item = std::move(stack.back());
        stack.pop_back();
        report.stats.boxes_processed++;
        report.stats.max_depth = std::max(report.stats.max_depth, item.depth);
        if (report.stats.boxes_processed > kBoxBudget) {
            report.unresolved.push_back({item.box, "max_depth"});
            continue;
        }

        if (comp.excluded(item.box)) continue;

        if (item.box.max_width() <= opts.min_width) {
            report.unresolved.push_back({item.box, "min_width"});
            continue;
        }

        // Krawczyk on a slightly inflated box so roots on bisection planes
        // still get certified.
        Box work = inflate(item.box, 1e-6, 1e-14);
        Box next;
        KrawczykOutcome o = krawczyk_step(comp, work, &next);
        if (o == KrawczykOutcome::kNoRoot) continue;
        if (o == KrawczykOutcome::kUnique) {
            CertifiedRoot root;
            root.isolation = work;
            root.box = contract_to_tol(comp, next, opts.tol);
            root.certified = true;
            root.residual = residual_at(comp, root.box.midpoint());
            report.roots.push_back(std::move(root));
            continue;
        }
        if (o == KrawczykOutcome::kContracted) {
            Box clipped;
            if (!intersect(next, item.box, &clipped)) continue;
            stack.push_back({clipped, item.depth});
            continue;
        }

        if (item.depth >= opts.max_depth) {
            report.unresolved.push_back({item.box, "max_depth"});
            continue;
        }
        auto [a, b] = item.box.bisect(item.box.widest_axis());
        stack.push_back({b, item.depth + 1});
        stack.push_back({a, item.depth + 1});
    }

    // Deduplicate roots certified in overlapping (inflated) boxes.
    std::sort(report.roots.begin(), report.roots.end(), midpoint_less);
    std::vector<CertifiedRoot> unique_roots;
    for (auto& r : report.roots) {
        bool dup = false;
        for (const auto& u : unique_roots) {
            const auto a = r.box.midpoint();
            const auto b = u.box.midpoint();
            double d = 0.0;
            for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
            double w = std::max(r.box.max_width(), u.box.max_width());
            if (d <= std::max(20.0 * opts.min_width, 8.0 * w)) { dup = true; break; }
        }
        if (!dup) unique_roots.push_back(std::move(r));
    }
    report.roots = std::move(unique_roots);
    return report;
}

CertifiedRoot refine_root(const CertifiedRoot& root, const SquareSystem& sys, double tol) {
    if (!root.certified) throw Error("refine_root: root is not certified");
    if (root.box.max_width() <= tol) return root;
    Compiled comp(sys);
    CertifiedRoot out = root;
    out.box = contract_to_tol(comp, root.box, tol);
    out.residual = residual_at(comp, out.box.midpoint());
    return out;
}

}  // namespace singulab
