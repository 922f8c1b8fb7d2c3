// Independent reference implementations used by the tests. None of these
// share code with the library beyond the state container.
#pragma once

#include "reclab/rng.hpp"
#include "reclab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

// |sum_k p_k exp(-i lambda_k t)|^2 by plain complex summation.
inline double fidelity(const std::vector<double>& lam, const std::vector<double>& p, double t) {
    std::complex<long double> s = 0;
    for (std::size_t k = 0; k < lam.size(); ++k) {
        const long double ph = -static_cast<long double>(lam[k]) * t;
        s += static_cast<long double>(p[k]) * std::complex<long double>(std::cos(ph), std::sin(ph));
    }
    return static_cast<double>(std::norm(s));
}

inline double distance(const std::vector<double>& lam, const std::vector<double>& p, double t) {
    return std::sqrt(std::max(0.0, 1.0 - fidelity(lam, p, t)));
}

// Root of f on [lo, hi] with f(lo), f(hi) of opposite sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-14) {
    double flo = f(lo);
    for (int i = 0; i < 300 && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct RawMoments {
    double mean, second, variance, fourth_central;
};

// Raw moments in long double, central moments from the expanded polynomial.
inline RawMoments moments(const std::vector<double>& lam, const std::vector<double>& p) {
    long double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
    for (std::size_t k = 0; k < lam.size(); ++k) {
        const long double x = lam[k];
        m1 += p[k] * x;
        m2 += p[k] * x * x;
        m3 += p[k] * x * x * x;
        m4 += p[k] * x * x * x * x;
    }
    const long double var = m2 - m1 * m1;
    const long double c4 = m4 - 4 * m1 * m3 + 6 * m1 * m1 * m2 - 3 * m1 * m1 * m1 * m1;
    return {static_cast<double>(m1), static_cast<double>(m2), static_cast<double>(var),
            static_cast<double>(c4)};
}

struct Crossing {
    double t;
    bool upward;  // D goes from below eps to above
};

// Every crossing of D = eps on (0, t_end], located on a uniform grid and
// refined by bisection of the direct-summation distance.
inline std::vector<Crossing> crossings(const std::vector<double>& lam, const std::vector<double>& p,
                                       double eps, double t_end, double step) {
    std::vector<Crossing> out;
    auto g = [&](double t) { return distance(lam, p, t) - eps; };
    double t0 = 0.0;
    double g0 = g(0.0);
    const auto n = static_cast<std::size_t>(std::ceil(t_end / step));
    for (std::size_t i = 1; i <= n; ++i) {
        const double t1 = std::min(t_end, static_cast<double>(i) * step);
        const double g1 = g(t1);
        if ((g0 < 0) != (g1 < 0)) out.push_back({bisect(g, t0, t1), g1 >= 0});
        t0 = t1;
        g0 = g1;
    }
    return out;
}

// min over phases of |sum_k p_k e^{i phi_k}|^2 for three levels: a grid over
// (phi_2, phi_3) with phi_1 = 0, then a local refinement around the best cell.
inline double min_fidelity3(const std::vector<double>& p, int grid = 1200) {
    auto val = [&](double a, double b) {
        const std::complex<double> s = p[0] + p[1] * std::polar(1.0, a) + p[2] * std::polar(1.0, b);
        return std::norm(s);
    };
    double best = 1e300, ba = 0, bb = 0;
    const double h = 2 * kPi / grid;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const double v = val(i * h, j * h);
            if (v < best) {
                best = v;
                ba = i * h;
                bb = j * h;
            }
        }
    }
    double span = h;
    for (int round = 0; round < 30; ++round) {
        const double a0 = ba, b0 = bb;
        for (int i = -10; i <= 10; ++i) {
            for (int j = -10; j <= 10; ++j) {
                const double a = a0 + i * span / 10, b = b0 + j * span / 10;
                const double v = val(a, b);
                if (v < best) {
                    best = v;
                    ba = a;
                    bb = b;
                }
            }
        }
        span *= 0.5;
    }
    return best;
}

// Smallest number of levels carrying at least 1 - delta, by subset enumeration.
inline std::size_t min_support(const std::vector<double>& p, double delta) {
    const std::size_t d = p.size();
    std::size_t best = d;
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        double mass = 0;
        std::size_t n = 0;
        for (std::size_t k = 0; k < d; ++k) {
            if (mask >> k & 1u) {
                mass += p[k];
                ++n;
            }
        }
        if (mass >= 1.0 - delta - 1e-12 && n < best) best = n;
    }
    return best;
}

struct Draw {
    std::vector<double> lam;
    std::vector<double> p;
    std::vector<reclab::Complex> amps;
    reclab::SpectralState state() const { return reclab::SpectralState::validate(lam, amps); }
};

// Spectrum uniform on [-1, 1], random probabilities, random phases.
inline Draw random_draw(reclab::CounterRng& rng, std::size_t d) {
    Draw out;
    double total = 0;
    for (std::size_t k = 0; k < d; ++k) {
        out.lam.push_back(rng.uniform(-1.0, 1.0));
        out.p.push_back(rng.uniform() + 1e-3);
        total += out.p.back();
    }
    for (auto& x : out.p) x /= total;
    for (std::size_t k = 0; k < d; ++k) {
        out.amps.push_back(std::polar(std::sqrt(out.p[k]), rng.phase()));
    }
    return out;
}

}  // namespace oracle
