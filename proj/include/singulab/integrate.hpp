#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "singulab/interval.hpp"

namespace singulab {

// Reproducible random source. Gaussians come from Box-Muller on top of the
// (standardized) mt19937_64 stream, so sequences are identical across runs
// with the same seed.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct DirectionSample {
    std::vector<double> v;  // unit vector
};

struct SubspaceSample {
    std::vector<std::vector<double>> frame;       // orthonormal basis of H
    std::vector<std::vector<double>> complement;  // orthonormal basis of H^perp
};

struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    size_t n = 0;
    uint64_t seed = 0;
};

// i.i.d. uniform directions on S^{n-1} (normalized Gaussians).
std::vector<DirectionSample> sample_directions(int n, size_t count, uint64_t seed);

// Haar-uniform k-dimensional subspaces of R^n with orthonormal frames.
std::vector<SubspaceSample> sample_subspaces(int n, int k, size_t count, uint64_t seed);

// One Gaussian direction / subspace from an already running stream (used by
// resampling loops so the draw order stays deterministic).
DirectionSample draw_direction(int n, Rng& rng);
SubspaceSample draw_subspace(int n, int k, Rng& rng);

struct SphereBallConstants {
    double s_k;  // volume of the k-dimensional unit sphere
    double b_k;  // volume of the k-dimensional unit ball
};

// s_k = 2 pi^{(k+1)/2} / Gamma((k+1)/2), b_k = pi^{k/2} / Gamma(k/2 + 1)
SphereBallConstants constants(int k);

MCEstimate mc_mean(const std::vector<double>& values, uint64_t seed_tag);

}  // namespace singulab
