#include "muentropy/estimates.hpp"

#include <cmath>

#include "muentropy/parallel.hpp"
#include "muentropy/quadrature.hpp"

namespace muentropy {

namespace {

// deterministic unit directions: polar grid in 2-D, seeded sphere otherwise
std::vector<Vec> direction_grid(int n, int count) {
    std::vector<Vec> dirs;
    if (n == 1) {
        Vec e(1);
        e(0) = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
        return dirs;
    }
    if (n == 2) {
        for (int j = 0; j < count; ++j) {
            double a = M_PI * j / count;  // antipodal pairs added below
            Vec d(2);
            d << std::cos(a), std::sin(a);
            dirs.push_back(d);
            dirs.push_back(-d);
        }
        return dirs;
    }
    Rng rng(0xd12ec7104aULL);
    for (int j = 0; j < count; ++j) {
        Vec d(n);
        for (int k = 0; k < n; ++k) d(k) = rng.normal();
        if (d.norm() < 1e-12) continue;
        d.normalize();
        dirs.push_back(d);
        dirs.push_back(-d);
    }
    return dirs;
}

}  // namespace

double delta_p(const ToricSystem& system, const Vec& x, int directions, double boundary_tol) {
    if (system.polytope.inradius_at(x) <= boundary_tol)
        throw BoundaryPointError("query point lies on the boundary");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& d : direction_grid(system.dim(), directions)) {
        double v = clipped_volume(system, HalfSpace{d, -d.dot(x)});
        best = std::min(best, v);
    }
    return best;
}

std::pair<double, double> mean_value_check(const ToricSystem& system,
                                           const PiecewiseAffineConvex& u, const Vec& x,
                                           int directions) {
    std::vector<PiecewiseAffineConvex> kinks{u};
    double mass = integrate_volume(system, [&](const Vec& y) { return u(y); }, kinks);
    double lhs = u(x);
    if (mass == 0.0) return {lhs, 0.0};
    return {lhs, mass / delta_p(system, x, directions)};
}

EstimateProbe poincare_probe(const ToricSystem& system, double exponent, int trials,
                             std::uint64_t seed) {
    EstimateProbe probe;
    probe.samples = trials;
    const std::size_t count = std::size_t(trials);
    probe.ratios.resize(count);
    std::vector<PiecewiseAffineConvex> witnesses(count);
    Rng root(seed);
    parallel_for(std::size_t(trials), [&](std::size_t t) {
        Rng rng = root.split(t);
        PiecewiseAffineConvex u = random_nonneg_convex(system.polytope, rng);
        std::vector<PiecewiseAffineConvex> kinks{u};
        double num = integrate_volume(
            system, [&](const Vec& y) { return std::pow(std::max(u(y), 0.0), exponent); }, kinks);
        double den = integrate_boundary(system, [&](const Vec& y) { return u(y); }, kinks);
        witnesses[t] = std::move(u);
        probe.ratios[t] = den > 0.0 ? std::pow(num, 1.0 / exponent) / den
                                    : std::numeric_limits<double>::infinity();
    });
    probe.sup_ratio = 0.0;
    for (std::size_t t = 0; t < probe.ratios.size(); ++t) {
        if (probe.ratios[t] > probe.sup_ratio) {
            probe.sup_ratio = probe.ratios[t];
            probe.witness = witnesses[t];
        }
    }
    return probe;
}

std::vector<double> rellich_majorant_probe(const ToricSystem& system,
                                           const std::vector<Vec>& points, int fn_samples,
                                           std::uint64_t seed) {
    const Polytope& P = system.polytope;
    // function battery: random convex plus spikes concentrated at each vertex
    std::vector<PiecewiseAffineConvex> battery;
    Rng root(seed);
    for (int t = 0; t < fn_samples; ++t) {
        Rng rng = root.split(std::uint64_t(t));
        battery.push_back(random_nonneg_convex(P, rng));
    }
    Vec c = P.centroid();
    for (int v = 0; v < P.vertex_count(); ++v) {
        Vec vert = P.vertex(v);
        Vec dir = vert - c;
        for (double scale : {1.0, 4.0, 16.0, 64.0, 256.0}) {
            // max(0, l) with l(vert) = 1, decaying toward the centroid
            AffineFn l{scale * dir / dir.squaredNorm(), 0.0};
            l.constant = 1.0 - l.gradient.dot(vert);
            battery.push_back(PiecewiseAffineConvex({AffineFn{Vec::Zero(P.dim()), 0.0}, l}));
        }
    }
    std::vector<double> masses(battery.size());
    parallel_for(battery.size(), [&](std::size_t i) {
        std::vector<PiecewiseAffineConvex> kinks{battery[i]};
        masses[i] =
            integrate_boundary(system, [&](const Vec& y) { return battery[i](y); }, kinks);
    });
    std::vector<double> out(points.size(), 0.0);
    for (std::size_t p = 0; p < points.size(); ++p)
        for (std::size_t i = 0; i < battery.size(); ++i)
            if (masses[i] > 1e-12)
                out[p] = std::max(out[p], battery[i](points[p]) / masses[i]);
    return out;
}

EntropyBoundSample entropy_bound_sample(const ToricSystem& system,
                                        const PiecewiseAffineConvex& u) {
    std::vector<PiecewiseAffineConvex> kinks{u};
    double mass = integrate_volume(system, [&](const Vec& y) { return u(y); }, kinks);
    EntropyBoundSample s;
    if (mass <= 0.0) return s;
    const double n = double(system.dim());
    const double q = n / (n - 1.0);
    s.lhs = integrate_volume(
        system,
        [&](const Vec& y) {
            double v = u(y) / mass;
            return v <= 1e-300 ? 0.0 : v * std::log(v);
        },
        kinks);
    double lq = integrate_volume(
        system, [&](const Vec& y) { return std::pow(std::max(u(y), 0.0) / mass, q); }, kinks);
    s.jensen_rhs = n * std::log(std::pow(lq, 1.0 / q));
    s.boundary_mass =
        integrate_boundary(system, [&](const Vec& y) { return u(y) / mass; }, kinks);
    return s;
}

}  // namespace muentropy
