#include "muentropy/convex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "muentropy/state.hpp"

namespace muentropy {

double PiecewiseAffineConvex::operator()(const Vec& x) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : pieces_) best = std::max(best, p(x));
    return best;
}

int PiecewiseAffineConvex::active_piece(const Vec& x) const {
    int arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        double v = pieces_[i](x);
        if (v > best) {
            best = v;
            arg = int(i);
        }
    }
    return arg;
}

PiecewiseAffineConvex PiecewiseAffineConvex::shifted(double c) const {
    auto pieces = pieces_;
    for (auto& p : pieces) p.constant += c;
    return PiecewiseAffineConvex(std::move(pieces));
}

PiecewiseAffineConvex PiecewiseAffineConvex::merged_with(const PiecewiseAffineConvex& other) const {
    auto pieces = pieces_;
    pieces.insert(pieces.end(), other.pieces_.begin(), other.pieces_.end());
    return PiecewiseAffineConvex(std::move(pieces));
}

PiecewiseAffineConvex PiecewiseAffineConvex::pruned(const Polytope& P, double tol) const {
    if (pieces_.size() <= 1) return *this;
    std::vector<AffineFn> kept;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        // keep piece i iff its active region within P has interior
        std::vector<HalfSpace> hs = P.halfspaces();
        bool duplicate = false;
        for (std::size_t j = 0; j < pieces_.size(); ++j) {
            if (j == i) continue;
            Vec dg = pieces_[i].gradient - pieces_[j].gradient;
            double dc = pieces_[i].constant - pieces_[j].constant;
            if (dg.norm() < 1e-14) {
                if (dc < -tol) {
                    duplicate = true;  // strictly below a parallel piece
                    break;
                }
                if (std::abs(dc) <= tol && j < i) {
                    duplicate = true;  // exact duplicate, keep the first
                    break;
                }
                continue;
            }
            hs.push_back(HalfSpace{dg, dc});
        }
        if (duplicate) continue;
        try {
            (void)Polytope::from_halfspaces(hs, P.tol());
            kept.push_back(pieces_[i]);
        } catch (const Error&) {
            // empty interior: nowhere strictly active
        }
    }
    if (kept.empty()) kept.push_back(pieces_[0]);
    return PiecewiseAffineConvex(std::move(kept));
}

PiecewiseAffineConvex linear_from_vector(const Vec& xi) {
    return PiecewiseAffineConvex({AffineFn{xi, 0.0}});
}

double SmoothedConvex::operator()(const Vec& x) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : base.pieces()) m = std::max(m, p(x));
    double acc = 0.0;
    for (const auto& p : base.pieces()) acc += std::exp(sharpness * (p(x) - m));
    return m + std::log(acc) / sharpness;
}

double pa_min_over(const Polytope& P, const PiecewiseAffineConvex& q) {
    const int n = P.dim();
    double cap = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < P.vertex_count(); ++v) cap = std::max(cap, q(P.vertex(v)));
    cap += 1.0 + std::abs(cap);

    std::vector<HalfSpace> hs;
    for (const auto& h : P.halfspaces()) {
        HalfSpace g;
        g.normal = Vec::Zero(n + 1);
        g.normal.head(n) = h.normal;
        g.offset = h.offset;
        hs.push_back(std::move(g));
    }
    for (const auto& p : q.pieces()) {
        HalfSpace g;  // t - l(x) >= 0
        g.normal = Vec::Zero(n + 1);
        g.normal.head(n) = -p.gradient;
        g.normal(n) = 1.0;
        g.offset = -p.constant;
        hs.push_back(std::move(g));
    }
    HalfSpace top;  // cap - t >= 0
    top.normal = Vec::Zero(n + 1);
    top.normal(n) = -1.0;
    top.offset = cap;
    hs.push_back(std::move(top));

    Polytope lifted = Polytope::from_halfspaces(std::move(hs), P.tol());
    double best = std::numeric_limits<double>::infinity();
    for (int v = 0; v < lifted.vertex_count(); ++v) best = std::min(best, lifted.vertex(v)(n));
    return best;
}

double midpoint_convexity_defect(const PiecewiseAffineConvex& q, const Polytope& P, Rng& rng,
                                 int trials) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        Vec x = sample_point(P, rng), y = sample_point(P, rng);
        Vec m = 0.5 * (x + y);
        worst = std::max(worst, q(m) - 0.5 * (q(x) + q(y)));
    }
    return worst;
}

Vec sample_point(const Polytope& P, Rng& rng) {
    const int n = P.dim();
    Vec lo = P.vertices().rowwise().minCoeff();
    Vec hi = P.vertices().rowwise().maxCoeff();
    Vec x(n);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        for (int d = 0; d < n; ++d) x(d) = rng.uniform(lo(d), hi(d));
        if (P.contains(x, 0.0)) return x;
    }
    return P.centroid();
}

PiecewiseAffineConvex random_nonneg_convex(const Polytope& P, Rng& rng) {
    const int n = P.dim();
    int m = 1 + int(rng.below(8));
    std::vector<AffineFn> pieces;
    for (int i = 0; i < m; ++i) {
        AffineFn p;
        p.gradient.resize(n);
        for (int d = 0; d < n; ++d) p.gradient(d) = rng.normal(0.0, 3.0);
        Vec anchor = sample_point(P, rng);
        p.constant = -p.gradient.dot(anchor);
        pieces.push_back(std::move(p));
    }
    PiecewiseAffineConvex q(std::move(pieces));
    return q.shifted(-pa_min_over(P, q));
}

// ---------------------------------------------------------------------------
// states

double State::log_density(const Vec& x) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& [w, q] : terms_) m = std::max(m, w + q(x));
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (const auto& [w, q] : terms_) acc += std::exp(w + q(x) - m);
    return m + std::log(acc);
}

State normalize(const ToricSystem& system, const PiecewiseAffineConvex& q,
                const QuadratureConfig& cfg) {
    // overflow-safe: shift by the max over vertices (a convex max lives there)
    double M = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < system.polytope.vertex_count(); ++v)
        M = std::max(M, q(system.polytope.vertex(v)));
    std::vector<PiecewiseAffineConvex> kinks{q};
    double mass = integrate_volume(
        system, [&](const Vec& x) { return std::exp(q(x) - M); }, kinks, cfg);
    double z = M + std::log(mass) - std::log(system.volume);
    return State({{-z, q}});
}

double state_mass(const ToricSystem& system, const State& u, const QuadratureConfig& cfg) {
    auto kinks = u.kinks();
    return integrate_volume(system, [&](const Vec& x) { return u.density(x); }, kinks, cfg);
}

State mixture(const State& u0, const State& u1, double t) {
    if (t <= 0.0) return u0;
    if (t >= 1.0) return u1;
    std::vector<std::pair<double, PiecewiseAffineConvex>> terms;
    for (const auto& [w, q] : u0.terms()) terms.emplace_back(w + std::log1p(-t), q);
    for (const auto& [w, q] : u1.terms()) terms.emplace_back(w + std::log(t), q);
    return State(std::move(terms));
}

double l1_distance(const ToricSystem& system, const State& a, const State& b, int order,
                   int refine) {
    QuadMesh mesh = volume_mesh(system, order, refine);
    return mesh.integrate([&](const Vec& x) { return std::abs(a.density(x) - b.density(x)); });
}

// ---------------------------------------------------------------------------
// tight envelope

namespace {

std::vector<Vec> boundary_samples(const ToricSystem& system, int grid) {
    std::vector<Vec> out;
    const int n = system.dim();
    for (const auto& [facet, s] : system.boundary_simplices) {
        (void)facet;
        const int k = s.dim();
        if (k == 0) {
            out.push_back(s.vertices.col(0));
            continue;
        }
        // barycentric lattice of resolution `grid`
        std::vector<int> t(k + 1, 0);
        std::function<void(int, int)> rec = [&](int pos, int left) {
            if (pos == k) {
                t[k] = left;
                Vec x = Vec::Zero(n);
                for (int i = 0; i <= k; ++i)
                    x += (double(t[i]) / grid) * s.vertices.col(i);
                out.push_back(std::move(x));
                return;
            }
            for (int v = 0; v <= left; ++v) {
                t[pos] = v;
                rec(pos + 1, left - v);
            }
        };
        rec(0, grid);
    }
    return out;
}

std::vector<Vec> gradient_grid(const PiecewiseAffineConvex& q, int n, int grid) {
    std::vector<Vec> dirs;
    double gmax = 1.0;
    for (const auto& p : q.pieces()) gmax = std::max(gmax, p.gradient.norm());
    gmax *= 2.0;
    auto push_scaled = [&](const Vec& d) {
        for (int r = 1; r <= grid; ++r) dirs.push_back(d * (gmax * r / grid));
    };
    if (n == 1) {
        Vec e(1);
        e(0) = 1.0;
        push_scaled(e);
        push_scaled(-e);
    } else if (n == 2) {
        int na = std::max(8, 4 * grid);
        for (int j = 0; j < na; ++j) {
            double a = 2.0 * M_PI * j / na;
            Vec d(2);
            d << std::cos(a), std::sin(a);
            push_scaled(d);
        }
    } else {
        // deterministic pseudo-grid on the sphere
        Rng rng(0x5eedULL);
        int count = 16 * grid;
        for (int j = 0; j < count; ++j) {
            Vec d(n);
            for (int k = 0; k < n; ++k) d(k) = rng.normal();
            if (d.norm() < 1e-12) continue;
            d.normalize();
            push_scaled(d);
        }
        for (int k = 0; k < n; ++k) {
            Vec d = Vec::Zero(n);
            d(k) = 1.0;
            push_scaled(d);
            push_scaled(-d);
        }
    }
    return dirs;
}

}  // namespace

PiecewiseAffineConvex tight_envelope(const ToricSystem& system, const PiecewiseAffineConvex& q,
                                     int grid) {
    const int n = system.dim();
    auto samples = boundary_samples(system, std::max(grid, 2));
    std::vector<double> qvals(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) qvals[i] = q(samples[i]);

    std::vector<AffineFn> pieces = q.pieces();  // q's own pieces are minorants
    for (const auto& g : gradient_grid(q, n, std::max(grid, 2))) {
        double c = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < samples.size(); ++i)
            c = std::min(c, qvals[i] - g.dot(samples[i]));
        pieces.push_back(AffineFn{g, c});
    }
    // sample-based prune: with hundreds of candidates the exact active-region
    // test is overkill; dominated pieces only cost evaluations anyway
    std::vector<Vec> probes = samples;
    for (int v = 0; v < system.polytope.vertex_count(); ++v)
        probes.push_back(system.polytope.vertex(v));
    Rng rng(0x7a11ULL);
    for (int i = 0; i < 256; ++i) probes.push_back(sample_point(system.polytope, rng));
    std::vector<bool> active(pieces.size(), false);
    for (const auto& x : probes) {
        int arg = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            double val = pieces[i](x);
            if (val > best) {
                best = val;
                arg = int(i);
            }
        }
        active[std::size_t(arg)] = true;
    }
    std::vector<AffineFn> kept;
    for (std::size_t i = 0; i < pieces.size(); ++i)
        if (active[i]) kept.push_back(pieces[i]);
    return PiecewiseAffineConvex(std::move(kept));
}

// ---------------------------------------------------------------------------
// vertex truncation (n = 2)

namespace {

// min over t in (0, 1] of (phi(t) - h)/t for the PA restriction phi to an
// edge; the min sits at a kink or at t = 1. Returns (slope, t*_smallest).
std::pair<double, double> touching_slope(const PiecewiseAffineConvex& q, const Vec& v,
                                         const Vec& other, double h) {
    Vec d = other - v;
    std::vector<double> cand;
    const auto& pieces = q.pieces();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        double ai = pieces[i](v), bi = pieces[i].gradient.dot(d);
        for (std::size_t j = i + 1; j < pieces.size(); ++j) {
            double aj = pieces[j](v), bj = pieces[j].gradient.dot(d);
            if (std::abs(bi - bj) < 1e-14) continue;
            double t = (aj - ai) / (bi - bj);
            if (t > 1e-12 && t < 1.0) cand.push_back(t);
        }
    }
    cand.push_back(1.0);
    std::sort(cand.begin(), cand.end());
    bool first = true;
    double best = 0.0, arg = 1.0;
    for (double t : cand) {
        double s = (q(v + t * d) - h) / t;
        if (first || s < best - 1e-12 * (1.0 + std::abs(best))) {
            best = s;
            arg = t;
            first = false;
        }
    }
    return {best, arg};
}

}  // namespace

VertexTruncation vertex_truncate_ex(const ToricSystem& system, const PiecewiseAffineConvex& q,
                                    const Vec& v, double h) {
    const Polytope& P = system.polytope;
    if (P.dim() != 2) throw Error("vertex truncation is defined for n = 2 only");
    int vid = -1;
    for (int i = 0; i < P.vertex_count(); ++i)
        if ((P.vertex(i) - v).norm() <= 1e-8 * (1.0 + v.norm())) vid = i;
    if (vid < 0) throw Error("v is not a vertex of P");

    VertexTruncation out;
    if (h >= q(v) - 1e-12 * (1.0 + std::abs(q(v)))) {
        out.q = q;
        out.touch0 = v;
        out.touch1 = v;
        out.plane = AffineFn{Vec::Zero(2), q(v)};
        return out;  // empty truncation
    }

    // the two edges at v
    std::vector<Vec> neighbors;
    for (const auto& f : P.facets()) {
        bool has = false;
        for (int id : f.vertex_ids)
            if (id == vid) has = true;
        if (!has) continue;
        for (int id : f.vertex_ids)
            if (id != vid) neighbors.push_back(P.vertex(id));
    }
    if (neighbors.size() != 2) throw Error("vertex does not have exactly two edges");

    auto [s0, t0] = touching_slope(q, v, neighbors[0], h);
    auto [s1, t1] = touching_slope(q, v, neighbors[1], h);
    Vec p0 = v + t0 * (neighbors[0] - v);
    Vec p1 = v + t1 * (neighbors[1] - v);

    // plane through (v,h), (p0,q(p0)), (p1,q(p1))
    Mat A(2, 2);
    A.row(0) = (p0 - v).transpose();
    A.row(1) = (p1 - v).transpose();
    Vec rhs(2);
    rhs << q(p0) - h, q(p1) - h;
    Eigen::FullPivLU<Mat> lu(A);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw SlopeConditionError("touch points collinear with the vertex");
    AffineFn plane;
    plane.gradient = lu.solve(rhs);
    plane.constant = h - plane.gradient.dot(v);

    // the plane must stay below q on all of P
    std::vector<AffineFn> diff;
    for (const auto& p : q.pieces())
        diff.push_back(AffineFn{p.gradient - plane.gradient, p.constant - plane.constant});
    double gap = pa_min_over(P, PiecewiseAffineConvex(std::move(diff)));
    if (gap < -1e-8 * (1.0 + std::abs(h)))
        throw SlopeConditionError("no supporting plane through (v, h) stays below q");

    // pieces with value <= h at v survive; they are below the plane on the
    // triangle and reproduce q outside it
    std::vector<AffineFn> pieces{plane};
    for (const auto& p : q.pieces())
        if (p(v) <= h + 1e-10 * (1.0 + std::abs(h))) pieces.push_back(p);
    out.q = PiecewiseAffineConvex(std::move(pieces)).pruned(P);
    out.touch0 = p0;
    out.touch1 = p1;
    out.plane = plane;
    return out;
}

PiecewiseAffineConvex vertex_truncate(const ToricSystem& system, const PiecewiseAffineConvex& q,
                                      const Vec& v, double h) {
    return vertex_truncate_ex(system, q, v, h).q;
}

}  // namespace muentropy
