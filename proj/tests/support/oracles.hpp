#pragma once

// Reference computations written against plain containers, sharing no code
// paths with the library beyond the big-number types.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstddef>
#include <map>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Big = boost::multiprecision::cpp_int;
using Frac = boost::multiprecision::cpp_rational;

/// allowed[x][y] for a relation on {0..nx-1} x {0..ny-1}.
using BoolMatrix = std::vector<std::vector<bool>>;

/// Joint of (X, F(X)) with X uniform over the x that have some admissible
/// y, and F uniform over all maps {0..nx-1} -> {0..ny-1} respecting the
/// relation on those x.
inline std::vector<std::vector<Frac>> function_space_joint(const BoolMatrix& allowed) {
    const std::size_t nx = allowed.size();
    const std::size_t ny = allowed.front().size();
    std::vector<std::size_t> support;
    for (std::size_t x = 0; x < nx; ++x) {
        bool any = false;
        for (std::size_t y = 0; y < ny; ++y) any = any || allowed[x][y];
        if (any) support.push_back(x);
    }
    std::vector<std::vector<Big>> hits(nx, std::vector<Big>(ny, 0));
    Big admissible = 0;
    std::size_t total = 1;
    for (std::size_t x = 0; x < nx; ++x) total *= ny;
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<std::size_t> f(nx);
        std::size_t c = code;
        for (std::size_t x = 0; x < nx; ++x) {
            f[x] = c % ny;
            c /= ny;
        }
        bool ok = true;
        for (std::size_t x : support) ok = ok && allowed[x][f[x]];
        if (!ok) continue;
        ++admissible;
        for (std::size_t x = 0; x < nx; ++x) ++hits[x][f[x]];
    }
    std::vector<std::vector<Frac>> joint(nx, std::vector<Frac>(ny, Frac(0)));
    for (std::size_t x : support)
        for (std::size_t y = 0; y < ny; ++y)
            joint[x][y] = Frac(hits[x][y], admissible) / Frac(support.size());
    return joint;
}

inline BoolMatrix random_relation(std::mt19937& rng, std::size_t nx, std::size_t ny) {
    std::bernoulli_distribution coin(0.45);
    BoolMatrix m(nx, std::vector<bool>(ny, false));
    bool any = false;
    while (!any) {
        for (auto& row : m)
            for (std::size_t y = 0; y < ny; ++y) {
                row[y] = coin(rng);
                any = any || row[y];
            }
    }
    return m;
}

/// MaxEnt on {1..6} with E[X] = mean, by bisection on the multiplier.
struct DieSolution {
    double lambda = 0.0;
    std::vector<double> p;
};

inline DieSolution die_bisection(double mean) {
    auto moments = [](double lambda) {
        std::vector<double> p(6);
        double z = 0.0;
        for (int i = 0; i < 6; ++i) z += p[i] = std::exp(lambda * (i + 1));
        double m = 0.0;
        for (int i = 0; i < 6; ++i) {
            p[i] /= z;
            m += p[i] * (i + 1);
        }
        return std::make_pair(m, p);
    };
    double lo = -20.0;
    double hi = 20.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (moments(mid).first < mean ? lo : hi) = mid;
    }
    DieSolution out;
    out.lambda = 0.5 * (lo + hi);
    out.p = moments(out.lambda).second;
    return out;
}

/// Raw-tuple census: masses of empirical joints within L1 delta of a
/// reference, for pairs drawn i.i.d. from `measure` (both indexed by cell).
inline Frac raw_census_mass(const std::vector<Frac>& measure, const std::vector<Frac>& reference, std::size_t n,
                            const Frac& delta) {
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < measure.size(); ++i)
        if (measure[i] > 0) cells.push_back(i);
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) total *= cells.size();
    Frac mass = 0;
    std::vector<std::size_t> counts(measure.size());
    for (std::size_t code = 0; code < total; ++code) {
        std::fill(counts.begin(), counts.end(), 0);
        Frac weight = 1;
        std::size_t c = code;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t cell = cells[c % cells.size()];
            c /= cells.size();
            ++counts[cell];
            weight *= measure[cell];
        }
        Frac dist = 0;
        for (std::size_t i = 0; i < measure.size(); ++i) {
            const Frac d = Frac(counts[i], n) - reference[i];
            dist += d < 0 ? Frac(-d) : d;
        }
        if (dist <= delta) mass += weight;
    }
    return mass;
}

/// Census under the Causal PIR construction on raw tuples: a cause n-tuple
/// uniform over S_X^n, then each effect uniform over the options of its
/// cause. Returns the mass within L1 delta of `reference` (cells x * ny + y)
/// and the expected empirical joint.
struct RawCausalCensus {
    Frac mass = 0;
    std::vector<Frac> expected;
};

inline RawCausalCensus raw_causal_census(const BoolMatrix& allowed, std::size_t n, const std::vector<Frac>& reference,
                                         const Frac& delta) {
    const std::size_t nx = allowed.size();
    const std::size_t ny = allowed.front().size();
    std::vector<std::size_t> causes;
    std::vector<std::vector<std::size_t>> options(nx);
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t y = 0; y < ny; ++y)
            if (allowed[x][y]) options[x].push_back(y);
        if (!options[x].empty()) causes.push_back(x);
    }
    RawCausalCensus out;
    out.expected.assign(nx * ny, Frac(0));
    std::size_t cause_tuples = 1;
    for (std::size_t k = 0; k < n; ++k) cause_tuples *= causes.size();
    const Frac cause_weight = Frac(1) / Frac(Big(cause_tuples));
    std::vector<std::size_t> xs(n);
    std::vector<std::size_t> counts(nx * ny);
    for (std::size_t code = 0; code < cause_tuples; ++code) {
        std::size_t c = code;
        std::size_t effect_tuples = 1;
        for (std::size_t k = 0; k < n; ++k) {
            xs[k] = causes[c % causes.size()];
            c /= causes.size();
            effect_tuples *= options[xs[k]].size();
        }
        const Frac weight = cause_weight / Frac(Big(effect_tuples));
        for (std::size_t e = 0; e < effect_tuples; ++e) {
            std::fill(counts.begin(), counts.end(), 0);
            std::size_t r = e;
            for (std::size_t k = 0; k < n; ++k) {
                const auto& opts = options[xs[k]];
                ++counts[xs[k] * ny + opts[r % opts.size()]];
                r /= opts.size();
            }
            Frac dist = 0;
            for (std::size_t i = 0; i < counts.size(); ++i) {
                const Frac d = Frac(counts[i], n) - reference[i];
                dist += d < 0 ? Frac(-d) : d;
                if (counts[i]) out.expected[i] += weight * Frac(counts[i], n);
            }
            if (dist <= delta) out.mass += weight;
        }
    }
    return out;
}

inline Big factorial(unsigned n) {
    Big out = 1;
    for (unsigned i = 2; i <= n; ++i) out *= i;
    return out;
}

}  // namespace oracle
