#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace singulab {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Closed interval [lo, hi] with outward rounding. Arithmetic is done in
// double precision and the result endpoints are widened by one ulp, which
// dominates the 0.5 ulp error of a correctly rounded operation.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double a, double b) : lo(a), hi(b) {
        if (!(lo <= hi)) throw Error("interval: lo > hi");
    }
    static Interval point(double x) { return Interval(x, x); }

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
    // smallest absolute value attained over the interval
    double mig() const {
        if (lo <= 0.0 && hi >= 0.0) return 0.0;
        return std::min(std::fabs(lo), std::fabs(hi));
    }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
    bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
    bool subset_of(const Interval& o) const { return o.lo <= lo && hi <= o.hi; }
    bool strict_subset_of(const Interval& o) const { return o.lo < lo && hi < o.hi; }
};

inline double next_down(double x) {
    return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
inline double next_up(double x) {
    return std::nextafter(x, std::numeric_limits<double>::infinity());
}

inline Interval widen(double lo, double hi) { return Interval(next_down(lo), next_up(hi)); }

inline Interval operator+(const Interval& a, const Interval& b) {
    return widen(a.lo + b.lo, a.hi + b.hi);
}
inline Interval operator-(const Interval& a, const Interval& b) {
    return widen(a.lo - b.hi, a.hi - b.lo);
}
inline Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }

inline Interval operator*(const Interval& a, const Interval& b) {
    double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return widen(std::min(std::min(p1, p2), std::min(p3, p4)),
                 std::max(std::max(p1, p2), std::max(p3, p4)));
}
inline Interval operator*(double s, const Interval& a) { return Interval::point(s) * a; }

inline Interval sqr(const Interval& a) {
    double m = a.mag();
    double lo = a.contains_zero() ? 0.0 : a.mig();
    return widen(lo * lo, m * m);
}

inline Interval pow_u(const Interval& a, unsigned e) {
    if (e == 0) return Interval(1.0, 1.0);
    if (e == 1) return a;
    Interval half = pow_u(a, e / 2);
    Interval s = sqr(half);
    return (e % 2 == 0) ? s : s * a;
}

inline bool intersect(const Interval& a, const Interval& b, Interval* out) {
    double lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
    if (lo > hi) return false;
    *out = Interval(lo, hi);
    return true;
}

inline Interval hull(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

// Axis-aligned box: product of intervals.
struct Box {
    std::vector<Interval> coords;

    Box() = default;
    explicit Box(std::vector<Interval> c) : coords(std::move(c)) {}
    static Box point(const std::vector<double>& p) {
        Box b;
        b.coords.reserve(p.size());
        for (double x : p) b.coords.push_back(Interval::point(x));
        return b;
    }
    static Box cube(int n, double lo, double hi) {
        Box b;
        b.coords.assign(static_cast<size_t>(n), Interval(lo, hi));
        return b;
    }

    int dim() const { return static_cast<int>(coords.size()); }
    double max_width() const {
        double w = 0.0;
        for (const auto& c : coords) w = std::max(w, c.width());
        return w;
    }
    int widest_axis() const {
        int best = 0;
        double w = -1.0;
        for (int i = 0; i < dim(); ++i)
            if (coords[static_cast<size_t>(i)].width() > w) { w = coords[static_cast<size_t>(i)].width(); best = i; }
        return best;
    }
    std::vector<double> midpoint() const {
        std::vector<double> m(coords.size());
        for (size_t i = 0; i < coords.size(); ++i) m[i] = coords[i].mid();
        return m;
    }
    bool contains(const Box& o) const {
        for (size_t i = 0; i < coords.size(); ++i)
            if (!o.coords[i].subset_of(coords[i])) return false;
        return true;
    }
    std::pair<Box, Box> bisect(int axis) const {
        Box a = *this, b = *this;
        double m = coords[static_cast<size_t>(axis)].mid();
        a.coords[static_cast<size_t>(axis)].hi = m;
        b.coords[static_cast<size_t>(axis)].lo = m;
        return {a, b};
    }
};

inline bool intersect(const Box& a, const Box& b, Box* out) {
    Box r;
    r.coords.resize(a.coords.size());
    for (size_t i = 0; i < a.coords.size(); ++i)
        if (!intersect(a.coords[i], b.coords[i], &r.coords[i])) return false;
    *out = r;
    return true;
}

inline bool disjoint(const Box& a, const Box& b) {
    for (size_t i = 0; i < a.coords.size(); ++i)
        if (!a.coords[i].intersects(b.coords[i])) return true;
    return false;
}

}  // namespace singulab
