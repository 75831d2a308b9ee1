#include "singulab/integrate.hpp"

#include <cmath>

namespace singulab {

namespace {

std::vector<double> gaussian_vector(int n, Rng& rng) {
    std::vector<double> v(static_cast<size_t>(n));
    for (auto& x : v) x = rng.gaussian();
    return v;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void normalize(std::vector<double>* v) {
    double nn = norm(*v);
    for (auto& x : *v) x /= nn;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// modified Gram-Schmidt with one re-orthogonalization pass
bool orthonormalize_against(std::vector<double>* v,
                            const std::vector<std::vector<double>>& basis) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) {
            double d = dot(*v, b);
            for (size_t i = 0; i < v->size(); ++i) (*v)[i] -= d * b[i];
        }
    double nn = norm(*v);
    if (nn < 1e-8) return false;
    for (auto& x : *v) x /= nn;
    return true;
}

}  // namespace

DirectionSample draw_direction(int n, Rng& rng) {
    while (true) {
        std::vector<double> v = gaussian_vector(n, rng);
        if (norm(v) > 1e-6) {
            normalize(&v);
            return DirectionSample{std::move(v)};
        }
    }
}

std::vector<DirectionSample> sample_directions(int n, size_t count, uint64_t seed) {
    if (n < 1 || count < 1) throw Error("sample_directions: need n >= 1, count >= 1");
    Rng rng(seed);
    std::vector<DirectionSample> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) out.push_back(draw_direction(n, rng));
    return out;
}

SubspaceSample draw_subspace(int n, int k, Rng& rng) {
    SubspaceSample s;
    while (static_cast<int>(s.frame.size()) < k) {
        std::vector<double> v = gaussian_vector(n, rng);
        if (orthonormalize_against(&v, s.frame)) s.frame.push_back(std::move(v));
    }
    std::vector<std::vector<double>> all = s.frame;
    while (static_cast<int>(all.size()) < n) {
        std::vector<double> v = gaussian_vector(n, rng);
        if (orthonormalize_against(&v, all)) {
            all.push_back(v);
            s.complement.push_back(std::move(v));
        }
    }
    return s;
}

std::vector<SubspaceSample> sample_subspaces(int n, int k, size_t count, uint64_t seed) {
    if (k < 0 || k > n) throw Error("sample_subspaces: need 0 <= k <= n");
    Rng rng(seed);
    std::vector<SubspaceSample> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) out.push_back(draw_subspace(n, k, rng));
    return out;
}

SphereBallConstants constants(int k) {
    if (k < 0) throw Error("constants: k >= 0 required");
    const double pi = 3.14159265358979323846264338328;
    double s = 2.0 * std::pow(pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
    double b = std::pow(pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
    return {s, b};
}

MCEstimate mc_mean(const std::vector<double>& values, uint64_t seed_tag) {
    if (values.size() < 2) throw Error("mc_mean: need at least two samples");
    MCEstimate e;
    e.n = values.size();
    e.seed = seed_tag;
    double sum = 0.0;
    for (double v : values) sum += v;  // fixed index order
    e.mean = sum / static_cast<double>(e.n);
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    double var = ss / static_cast<double>(e.n - 1);
    e.stderr_ = std::sqrt(var / static_cast<double>(e.n));
    return e;
}

}  // namespace singulab
