#include "muentropy/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>

namespace muentropy {

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_01(int order) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    // Newton iteration on P_n over [-1,1], then map to [0,1]
    const int n = std::max(order, 1);
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p0 = 0.0, p1 = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            p0 = 1.0;
            p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            double dp = n * (t * p0 - p1) / (t * t - 1.0);
            double dt = p0 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        p0 = 1.0;
        p1 = 0.0;
        for (int j = 0; j < n; ++j) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
        }
        double dp = n * (t * p0 - p1) / (t * t - 1.0);
        x[i] = 0.5 * (t + 1.0);
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    return cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first->second;
}

namespace {

// Collapsed (stick-breaking) tensor rule on the standard k-simplex:
// barycentric nodes t with weights integrating to 1/k!.
struct SimplexRule {
    int dim = 0;
    std::vector<double> bary;     // node-major, k entries each (t_1..t_k)
    std::vector<double> weights;  // sum = 1/k!
    std::size_t size() const { return weights.size(); }
};

const SimplexRule& simplex_rule(int k, int order) {
    static std::map<std::pair<int, int>, SimplexRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(k, order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    SimplexRule rule;
    rule.dim = k;
    if (k == 0) {
        rule.weights = {1.0};
        cache.emplace(key, std::move(rule));
        return cache.at(key);
    }
    const auto& [gx, gw] = gauss_legendre_01(order);
    const int m = int(gx.size());
    std::vector<int> idx(k, 0);
    for (;;) {
        // stick-breaking map t_a = u_a * prod_{b<a}(1-u_b),
        // |J| = prod_a (1-u_a)^(k-1-a); weights sum to 1/k!
        double wgt = 1.0;
        std::vector<double> t(k);
        double remaining = 1.0;
        for (int a = 0; a < k; ++a) {
            double u = gx[idx[a]];
            wgt *= gw[idx[a]];
            t[a] = u * remaining;
            if (a + 1 < k) wgt *= std::pow(1.0 - u, k - 1 - a);
            remaining *= (1.0 - u);
        }
        rule.bary.insert(rule.bary.end(), t.begin(), t.end());
        rule.weights.push_back(wgt);
        int a = k - 1;
        while (a >= 0 && ++idx[a] == m) idx[a--] = 0;
        if (a < 0) break;
    }
    cache.emplace(key, std::move(rule));
    return cache.at(key);
}

// nodes/weights of the rule mapped onto a physical simplex; weights sum to
// its measure
void map_rule(const Simplex& s, int order, std::vector<Vec>& pts, std::vector<double>& wts) {
    const int k = s.dim();
    const auto& rule = simplex_rule(k, order);
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    pts.clear();
    wts.clear();
    pts.reserve(rule.size());
    wts.reserve(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        Vec x = s.vertices.col(0);
        for (int a = 0; a < k; ++a)
            x += rule.bary[q * k + a] * (s.vertices.col(a + 1) - s.vertices.col(0));
        pts.push_back(std::move(x));
        wts.push_back(rule.weights[q] * s.measure * fact);
    }
}

double apply_rule(const Simplex& s, const ScalarField& f, int order, bool* finite) {
    std::vector<Vec> pts;
    std::vector<double> wts;
    map_rule(s, order, pts, wts);
    double acc = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double v = f(pts[i]);
        if (!std::isfinite(v)) {
            ok = false;
            v = 0.0;
        }
        acc += wts[i] * v;
    }
    if (finite) *finite = ok;
    return acc;
}

std::pair<Simplex, Simplex> bisect_longest_edge(const Simplex& s) {
    const int k = s.dim();
    int bi = 0, bj = 1;
    double best = -1.0;
    for (int i = 0; i <= k; ++i)
        for (int j = i + 1; j <= k; ++j) {
            double d = (s.vertices.col(i) - s.vertices.col(j)).squaredNorm();
            if (d > best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    Vec mid = 0.5 * (s.vertices.col(bi) + s.vertices.col(bj));
    Simplex a = s, b = s;
    a.vertices.col(bj) = mid;
    b.vertices.col(bi) = mid;
    a.measure = 0.5 * s.measure;
    b.measure = 0.5 * s.measure;
    return {std::move(a), std::move(b)};
}

struct AdaptiveState {
    const ScalarField* f = nullptr;
    int order = 8;
    int max_subdiv = 12;
    double value = 0.0;
    double error = 0.0;
    bool nonfinite = false;
};

void adapt(const Simplex& s, double coarse, bool coarse_ok, double tol, int depth,
           AdaptiveState& st) {
    auto [a, b] = bisect_longest_edge(s);
    bool ok_a = true, ok_b = true;
    double fa = apply_rule(a, *st.f, st.order, &ok_a);
    double fb = apply_rule(b, *st.f, st.order, &ok_b);
    double fine = fa + fb;
    double err = std::abs(fine - coarse);
    bool ok = ok_a && ok_b && coarse_ok;
    if (depth >= st.max_subdiv) {
        if (!ok) st.nonfinite = true;
        st.value += fine;
        st.error += err;
        return;
    }
    if (ok && err <= tol) {
        st.value += fine;
        st.error += err;
        return;
    }
    adapt(a, fa, ok_a, tol * 0.5, depth + 1, st);
    adapt(b, fb, ok_b, tol * 0.5, depth + 1, st);
}

QuadResult integrate_cells(const std::vector<Simplex>& cells, const std::vector<double>& density,
                           const ScalarField& f, const QuadratureConfig& cfg) {
    // first pass for a scale estimate, then adaptive refinement
    AdaptiveState st;
    st.f = &f;
    st.order = cfg.order;
    st.max_subdiv = cfg.max_subdiv;
    double rough = 0.0;
    std::vector<double> coarse(cells.size());
    std::vector<bool> coarse_ok(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        bool ok = true;
        coarse[i] = apply_rule(cells[i], f, cfg.order, &ok);
        coarse_ok[i] = ok;
        rough += std::abs(coarse[i]) * density[i];
    }
    double tol_total = cfg.rel_tol * std::max(rough, 1e-300);
    QuadResult out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        AdaptiveState cell_state = st;
        adapt(cells[i], coarse[i], coarse_ok[i], tol_total / double(cells.size()), 0, cell_state);
        if (cell_state.nonfinite)
            throw NonFiniteError("integrand non-finite at quadrature node after subdivision limit");
        out.value += cell_state.value * density[i];
        out.error_estimate += cell_state.error * density[i];
    }
    return out;
}

}  // namespace

QuadResult integrate_volume_ex(const ToricSystem& system, const ScalarField& f,
                               const QuadratureConfig& cfg) {
    std::vector<double> density(system.interior_simplices.size(), system.interior_density);
    return integrate_cells(system.interior_simplices, density, f, cfg);
}

QuadResult integrate_boundary_ex(const ToricSystem& system, const ScalarField& f,
                                 const QuadratureConfig& cfg) {
    std::vector<Simplex> cells;
    std::vector<double> density;
    for (const auto& [facet, s] : system.boundary_simplices) {
        if (system.facet_densities[facet] == 0.0) continue;
        cells.push_back(s);
        density.push_back(system.facet_densities[facet]);
    }
    if (cells.empty()) return {};
    if (system.dim() == 1) {
        // boundary facets are points with masses
        QuadResult out;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            double v = f(cells[i].vertices.col(0));
            if (!std::isfinite(v)) throw NonFiniteError("integrand non-finite at boundary point");
            out.value += v * density[i];
        }
        return out;
    }
    return integrate_cells(cells, density, f, cfg);
}

double integrate_volume(const ToricSystem& system, const ScalarField& f,
                        const QuadratureConfig& cfg) {
    return integrate_volume_ex(system, f, cfg).value;
}

double integrate_boundary(const ToricSystem& system, const ScalarField& f,
                          const QuadratureConfig& cfg) {
    return integrate_boundary_ex(system, f, cfg).value;
}

// ---------------------------------------------------------------------------
// kink-aware splitting

std::vector<Simplex> clip_simplex_by_halfspaces(const Simplex& s,
                                                const std::vector<HalfSpace>& cuts) {
    const int k = s.dim();
    const int n = s.ambient_dim();
    if (k == 0) {
        for (const auto& h : cuts)
            if (h.value(s.vertices.col(0)) < -1e-12) return {};
        return {s};
    }
    // affine chart y -> v0 + E y over the standard k-simplex
    Mat E(n, k);
    for (int i = 0; i < k; ++i) E.col(i) = s.vertices.col(i + 1) - s.vertices.col(0);
    std::vector<HalfSpace> chart;
    for (int i = 0; i < k; ++i) {
        Vec e = Vec::Zero(k);
        e(i) = 1.0;
        chart.push_back(HalfSpace{e, 0.0});
    }
    chart.push_back(HalfSpace{Vec::Constant(k, -1.0), 1.0});
    double scale = std::max(1.0, E.cwiseAbs().maxCoeff());
    for (const auto& h : cuts) {
        Vec g = E.transpose() * h.normal;
        double c = h.value(s.vertices.col(0));
        if (g.norm() <= 1e-12 * scale * h.normal.norm()) {
            if (c < -1e-12) return {};  // entirely cut away
            continue;                   // constraint inactive on the chart
        }
        chart.push_back(HalfSpace{g, c});
    }
    std::vector<Simplex> out;
    try {
        Polytope region = Polytope::from_halfspaces(std::move(chart), 1e-12);
        for (const auto& cell : region.triangulate()) {
            Simplex mapped;
            mapped.vertices.resize(n, cell.vertices.cols());
            for (int c = 0; c < cell.vertices.cols(); ++c)
                mapped.vertices.col(c) = s.vertices.col(0) + E * cell.vertices.col(c);
            mapped.measure = simplex_measure(mapped.vertices);
            if (mapped.measure > 1e-14 * s.measure) out.push_back(std::move(mapped));
        }
    } catch (const Error&) {
        return {};
    }
    return out;
}

std::vector<Simplex> split_by_active_pieces(const std::vector<Simplex>& cells,
                                            const PiecewiseAffineConvex& q) {
    const auto& pieces = q.pieces();
    if (pieces.size() <= 1) return cells;
    std::vector<Simplex> out;
    for (const auto& cell : cells) {
        double covered = 0.0;
        std::vector<Simplex> parts;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            std::vector<HalfSpace> cuts;
            bool shadowed = false;
            for (std::size_t j = 0; j < pieces.size() && !shadowed; ++j) {
                if (j == i) continue;
                Vec dg = pieces[i].gradient - pieces[j].gradient;
                double dc = pieces[i].constant - pieces[j].constant;
                if (dg.norm() < 1e-13) {
                    // parallel pieces: drop i when below or a duplicate of an
                    // earlier piece
                    if (dc < -1e-13 || (std::abs(dc) <= 1e-13 && j < i)) shadowed = true;
                    continue;
                }
                cuts.push_back(HalfSpace{dg, dc});
            }
            if (shadowed) continue;
            for (auto& part : clip_simplex_by_halfspaces(cell, cuts)) {
                covered += part.measure;
                parts.push_back(std::move(part));
            }
        }
        // the regions must tile the cell; otherwise keep it unsplit
        if (std::abs(covered - cell.measure) <= 1e-8 * cell.measure)
            out.insert(out.end(), parts.begin(), parts.end());
        else
            out.push_back(cell);
    }
    return out;
}

namespace {

std::vector<Simplex> split_by_all(std::vector<Simplex> cells,
                                  std::span<const PiecewiseAffineConvex> kinks) {
    constexpr std::size_t kCellCap = 20000;
    for (const auto& q : kinks) {
        if (cells.size() > kCellCap) break;
        cells = split_by_active_pieces(cells, q);
    }
    return cells;
}

}  // namespace

QuadResult integrate_volume_ex(const ToricSystem& system, const ScalarField& f,
                               std::span<const PiecewiseAffineConvex> kinks,
                               const QuadratureConfig& cfg) {
    auto cells = split_by_all(system.interior_simplices, kinks);
    std::vector<double> density(cells.size(), system.interior_density);
    return integrate_cells(cells, density, f, cfg);
}

QuadResult integrate_boundary_ex(const ToricSystem& system, const ScalarField& f,
                                 std::span<const PiecewiseAffineConvex> kinks,
                                 const QuadratureConfig& cfg) {
    std::vector<Simplex> cells;
    std::vector<double> density;
    for (const auto& [facet, s] : system.boundary_simplices) {
        if (system.facet_densities[facet] == 0.0) continue;
        for (auto& part : split_by_all({s}, kinks)) {
            cells.push_back(std::move(part));
            density.push_back(system.facet_densities[facet]);
        }
    }
    if (cells.empty()) return {};
    if (system.dim() == 1) {
        QuadResult out;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            double v = f(cells[i].vertices.col(0));
            if (!std::isfinite(v)) throw NonFiniteError("integrand non-finite at boundary point");
            out.value += v * density[i];
        }
        return out;
    }
    return integrate_cells(cells, density, f, cfg);
}

double integrate_volume(const ToricSystem& system, const ScalarField& f,
                        std::span<const PiecewiseAffineConvex> kinks,
                        const QuadratureConfig& cfg) {
    return integrate_volume_ex(system, f, kinks, cfg).value;
}

double integrate_boundary(const ToricSystem& system, const ScalarField& f,
                          std::span<const PiecewiseAffineConvex> kinks,
                          const QuadratureConfig& cfg) {
    return integrate_boundary_ex(system, f, kinks, cfg).value;
}

// ---------------------------------------------------------------------------
// exact kernels

namespace {
constexpr double kSeriesSpread = 2.0;
constexpr int kSeriesTerms = 40;

double factorial(int k) {
    static const auto table = [] {
        std::array<double, 171> t{};
        t[0] = 1.0;
        for (int i = 1; i < 171; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    return table[std::size_t(k)];
}

// exp[nodes[i..j]] by the shifted series: e^m * sum_k h_k(b)/(L+k)!, with
// h_k the complete homogeneous symmetric polynomials of the centered nodes
double expdd_series(const double* nodes, int count) {
    double m = 0.0;
    for (int i = 0; i < count; ++i) m += nodes[i];
    m /= count;
    double H[kSeriesTerms + 1] = {0.0};
    H[0] = 1.0;
    for (int i = 0; i < count; ++i) {
        double b = nodes[i] - m;
        for (int k = 1; k <= kSeriesTerms; ++k) H[k] += b * H[k - 1];
    }
    const int L = count - 1;
    double s = 0.0;
    for (int k = kSeriesTerms; k >= 0; --k) s += H[k] / factorial(L + k);
    return std::exp(m) * s;
}

}  // namespace

double exp_divided_difference(std::span<const double> nodes) {
    const int n1 = int(nodes.size());
    if (n1 == 0) return 0.0;
    std::vector<double> a(nodes.begin(), nodes.end());
    std::sort(a.begin(), a.end());
    if (a.back() - a.front() <= kSeriesSpread) return expdd_series(a.data(), n1);
    // dd table; each entry falls back to the series when its block clusters
    std::vector<std::vector<double>> f(n1, std::vector<double>(n1, 0.0));
    for (int i = 0; i < n1; ++i) f[i][i] = std::exp(a[i]);
    for (int len = 1; len < n1; ++len) {
        for (int i = 0; i + len < n1; ++i) {
            int j = i + len;
            if (a[j] - a[i] <= kSeriesSpread)
                f[i][j] = expdd_series(a.data() + i, len + 1);
            else
                f[i][j] = (f[i + 1][j] - f[i][j - 1]) / (a[j] - a[i]);
        }
    }
    return f[0][n1 - 1];
}

double exact_exp_affine_simplex(const Simplex& simplex, const AffineFn& l) {
    const int k = simplex.dim();
    std::vector<double> nodes(k + 1);
    for (int i = 0; i <= k; ++i) nodes[i] = l(simplex.vertices.col(i));
    return factorial(k) * simplex.measure * exp_divided_difference(nodes);
}

double exact_affine_exp_affine_simplex(const Simplex& simplex, const AffineFn& a,
                                       const AffineFn& l) {
    const int k = simplex.dim();
    std::vector<double> nodes(k + 2);
    for (int i = 0; i <= k; ++i) nodes[i] = l(simplex.vertices.col(i));
    double acc = 0.0;
    for (int i = 0; i <= k; ++i) {
        double ai = a(simplex.vertices.col(i));
        if (ai == 0.0) continue;
        nodes[k + 1] = nodes[i];
        acc += ai * exp_divided_difference(nodes);
    }
    return factorial(k) * simplex.measure * acc;
}

double exact_quadratic_exp_affine_simplex(const Simplex& simplex, const AffineFn& a,
                                          const AffineFn& b, const AffineFn& l) {
    const int k = simplex.dim();
    std::vector<double> nodes(k + 3);
    for (int i = 0; i <= k; ++i) nodes[i] = l(simplex.vertices.col(i));
    double acc = 0.0;
    for (int i = 0; i <= k; ++i) {
        double ai = a(simplex.vertices.col(i));
        if (ai == 0.0) continue;
        for (int j = 0; j <= k; ++j) {
            double bj = b(simplex.vertices.col(j));
            if (bj == 0.0) continue;
            nodes[k + 1] = nodes[i];
            nodes[k + 2] = nodes[j];
            double dd = exp_divided_difference(nodes);
            acc += ai * bj * (i == j ? 2.0 * dd : dd);
        }
    }
    return factorial(k) * simplex.measure * acc;
}

double integrate_volume_exp_affine(const ToricSystem& system, const AffineFn& l) {
    double acc = 0.0;
    for (const auto& s : system.interior_simplices) acc += exact_exp_affine_simplex(s, l);
    return acc * system.interior_density;
}

double integrate_boundary_exp_affine(const ToricSystem& system, const AffineFn& l) {
    double acc = 0.0;
    for (const auto& [facet, s] : system.boundary_simplices)
        acc += system.facet_densities[facet] * exact_exp_affine_simplex(s, l);
    return acc;
}

double integrate_volume_affine_exp(const ToricSystem& system, const AffineFn& a,
                                   const AffineFn& l) {
    double acc = 0.0;
    for (const auto& s : system.interior_simplices)
        acc += exact_affine_exp_affine_simplex(s, a, l);
    return acc * system.interior_density;
}

double integrate_boundary_affine_exp(const ToricSystem& system, const AffineFn& a,
                                     const AffineFn& l) {
    double acc = 0.0;
    for (const auto& [facet, s] : system.boundary_simplices)
        acc += system.facet_densities[facet] * exact_affine_exp_affine_simplex(s, a, l);
    return acc;
}

double integrate_volume_quadratic_exp(const ToricSystem& system, const AffineFn& a,
                                      const AffineFn& b, const AffineFn& l) {
    double acc = 0.0;
    for (const auto& s : system.interior_simplices)
        acc += exact_quadratic_exp_affine_simplex(s, a, b, l);
    return acc * system.interior_density;
}

// ---------------------------------------------------------------------------
// fixed meshes

namespace {

void append_cells(const Simplex& s, int refine, std::vector<Simplex>& out) {
    if (refine <= 0 || s.dim() == 0) {
        out.push_back(s);
        return;
    }
    auto [a, b] = bisect_longest_edge(s);
    append_cells(a, refine - 1, out);
    append_cells(b, refine - 1, out);
}

void append_mesh(const Simplex& s, double density, int order, int refine, QuadMesh& mesh) {
    std::vector<Simplex> cells;
    append_cells(s, refine, cells);
    std::vector<Vec> pts;
    std::vector<double> wts;
    for (const auto& cell : cells) {
        if (cell.dim() == 0) {
            mesh.weights.push_back(density);
            for (int d = 0; d < mesh.dim; ++d) mesh.points.push_back(cell.vertices(d, 0));
            continue;
        }
        map_rule(cell, order, pts, wts);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            mesh.weights.push_back(wts[i] * density);
            for (int d = 0; d < mesh.dim; ++d) mesh.points.push_back(pts[i](d));
        }
    }
}

}  // namespace

QuadMesh volume_mesh(const ToricSystem& system, int order, int refine) {
    QuadMesh mesh;
    mesh.dim = system.dim();
    for (const auto& s : system.interior_simplices)
        append_mesh(s, system.interior_density, order, refine, mesh);
    return mesh;
}

QuadMesh boundary_mesh(const ToricSystem& system, int order, int refine) {
    QuadMesh mesh;
    mesh.dim = system.dim();
    for (const auto& [facet, s] : system.boundary_simplices) {
        if (system.facet_densities[facet] == 0.0) continue;
        append_mesh(s, system.facet_densities[facet], order, refine, mesh);
    }
    return mesh;
}

double QuadMesh::integrate(const ScalarField& f) const {
    double acc = 0.0;
    Vec x(dim);
    for (std::size_t i = 0; i < size(); ++i) {
        for (int d = 0; d < dim; ++d) x(d) = point(i)[d];
        acc += weights[i] * f(x);
    }
    return acc;
}

}  // namespace muentropy
