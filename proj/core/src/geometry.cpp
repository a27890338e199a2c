#include "muentropy/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

namespace muentropy {

namespace {

// visit all k-subsets of {0..m-1}
template <typename F>
void for_each_subset(int m, int k, F&& visit) {
    if (k > m || k <= 0) return;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        visit(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == m - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

int affine_rank(const Mat& points, const std::vector<int>& ids, double tol) {
    if (ids.size() <= 1) return 0;
    Mat diffs(points.rows(), ids.size() - 1);
    for (std::size_t i = 1; i < ids.size(); ++i)
        diffs.col(i - 1) = points.col(ids[i]) - points.col(ids[0]);
    Eigen::JacobiSVD<Mat> svd(diffs);
    double scale = std::max(1.0, svd.singularValues()(0));
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol * scale) ++rank;
    return rank;
}

int matrix_rank(const Mat& m, double tol) {
    Eigen::JacobiSVD<Mat> svd(m);
    if (svd.singularValues().size() == 0) return 0;
    double scale = std::max(1.0, svd.singularValues()(0));
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol * scale) ++rank;
    return rank;
}

}  // namespace

double simplex_measure(const Mat& vertices) {
    const int k = int(vertices.cols()) - 1;
    if (k <= 0) return 1.0;  // point: counting measure
    Mat edges(vertices.rows(), k);
    for (int i = 0; i < k; ++i) edges.col(i) = vertices.col(i + 1) - vertices.col(0);
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    if (k == int(vertices.rows())) return std::abs(edges.determinant()) / fact;
    Mat gram = edges.transpose() * edges;
    double g = gram.determinant();
    return g <= 0.0 ? 0.0 : std::sqrt(g) / fact;
}

Polytope Polytope::from_halfspaces(std::vector<HalfSpace> halfspaces, double tol) {
    if (halfspaces.empty()) throw EmptyOrUnboundedError("no halfspaces given");
    const int n = int(halfspaces[0].normal.size());
    if (n < 1) throw EmptyOrUnboundedError("ambient dimension must be >= 1");
    for (auto& h : halfspaces) {
        if (int(h.normal.size()) != n) throw DegenerateError("mixed ambient dimensions");
        if (h.normal.norm() == 0.0) throw DegenerateError("zero normal");
    }

    // drop exact duplicates up to positive scaling
    {
        std::vector<HalfSpace> unique;
        for (const auto& h : halfspaces) {
            double s = h.normal.norm();
            Vec un = h.normal / s;
            double uo = h.offset / s;
            bool dup = false;
            for (const auto& g : unique) {
                double t = g.normal.norm();
                if ((g.normal / t - un).norm() < 1e-12 && std::abs(g.offset / t - uo) < 1e-12) {
                    dup = true;
                    break;
                }
            }
            if (!dup) unique.push_back(h);
        }
        halfspaces.swap(unique);
    }
    const int m = int(halfspaces.size());

    // boundedness: normals must span R^n and the recession cone must be {0};
    // extreme rays lie on n-1 independent normals, so check their null
    // directions
    {
        Mat normals(n, m);
        for (int i = 0; i < m; ++i) normals.col(i) = halfspaces[i].normal;
        if (matrix_rank(normals, 1e-10) < n)
            throw EmptyOrUnboundedError("normals do not span the ambient space (unbounded)");
        auto ray_feasible = [&](const Vec& d) {
            for (const auto& h : halfspaces)
                if (h.normal.dot(d) < -1e-10) return false;
            return true;
        };
        if (n == 1) {
            // need both orientations present
            Vec e(1);
            e(0) = 1.0;
            if (ray_feasible(e) || ray_feasible(-e))
                throw EmptyOrUnboundedError("unbounded in dimension 1");
        } else {
            for_each_subset(m, n - 1, [&](const std::vector<int>& idx) {
                Mat sub(int(idx.size()), n);
                for (std::size_t r = 0; r < idx.size(); ++r)
                    sub.row(int(r)) = halfspaces[idx[r]].normal.transpose();
                Eigen::FullPivLU<Mat> lu(sub);
                lu.setThreshold(1e-10);
                Mat kernel = lu.kernel();
                for (int c = 0; c < kernel.cols(); ++c) {
                    Vec d = kernel.col(c);
                    if (d.norm() < 1e-12) continue;
                    d.normalize();
                    if (ray_feasible(d) || ray_feasible(-d))
                        throw EmptyOrUnboundedError("recession direction found (unbounded)");
                }
            });
        }
    }

    // vertex candidates from n-subsets of hyperplanes
    std::vector<Vec> cand;
    for_each_subset(m, n, [&](const std::vector<int>& idx) {
        Mat A(n, n);
        Vec b(n);
        for (int r = 0; r < n; ++r) {
            A.row(r) = halfspaces[idx[r]].normal.transpose();
            b(r) = -halfspaces[idx[r]].offset;
        }
        Eigen::FullPivLU<Mat> lu(A);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) return;
        Vec x = lu.solve(b);
        for (const auto& h : halfspaces)
            if (h.value(x) < -tol) return;
        for (const auto& v : cand)
            if ((v - x).norm() < 1e-7 * (1.0 + x.norm())) return;
        cand.push_back(x);
    });
    if (cand.empty()) throw EmptyOrUnboundedError("no vertices (empty polytope)");

    Mat verts(n, cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i) verts.col(int(i)) = cand[i];

    // interior point: the vertex barycenter is interior iff P is full-dim
    Vec c = verts.rowwise().mean();
    for (const auto& h : halfspaces)
        if (h.value(c) <= tol)
            throw EmptyOrUnboundedError("empty interior (polytope is lower-dimensional)");

    // facets: contact set of a halfspace must have affine dimension n-1;
    // anything else is redundant for a bounded full-dimensional polytope
    std::vector<HalfSpace> kept;
    std::vector<Facet> facets;
    for (int j = 0; j < m; ++j) {
        std::vector<int> on;
        for (int v = 0; v < verts.cols(); ++v)
            if (std::abs(halfspaces[j].value(verts.col(v))) <= tol * (1.0 + verts.col(v).norm()))
                on.push_back(v);
        if (int(on.size()) >= n && affine_rank(verts, on, 1e-9) == n - 1) {
            Facet f;
            f.halfspace = int(kept.size());
            f.vertex_ids = on;
            kept.push_back(halfspaces[j]);
            facets.push_back(std::move(f));
        } else if (!on.empty() && int(on.size()) >= n) {
            throw DegenerateError("facet contact set has affine dimension below n-1");
        }
    }

    // true vertices: active facet normals span R^n; rebuild facet vertex sets
    std::vector<int> keep_vertex;
    for (int v = 0; v < verts.cols(); ++v) {
        Mat active(n, 0);
        for (const auto& h : kept) {
            if (std::abs(h.value(verts.col(v))) <= tol * (1.0 + verts.col(v).norm())) {
                active.conservativeResize(Eigen::NoChange, active.cols() + 1);
                active.col(active.cols() - 1) = h.normal;
            }
        }
        if (active.cols() >= n && matrix_rank(active, 1e-9) == n) keep_vertex.push_back(v);
    }
    if (keep_vertex.empty()) throw EmptyOrUnboundedError("no vertices after redundancy removal");

    Polytope p;
    p.dim_ = n;
    p.tol_ = tol;
    p.halfspaces_ = std::move(kept);
    p.vertices_.resize(n, keep_vertex.size());
    for (std::size_t i = 0; i < keep_vertex.size(); ++i)
        p.vertices_.col(int(i)) = verts.col(keep_vertex[i]);
    p.facets_.clear();
    for (std::size_t j = 0; j < p.halfspaces_.size(); ++j) {
        Facet f;
        f.halfspace = int(j);
        for (int v = 0; v < p.vertices_.cols(); ++v)
            if (std::abs(p.halfspaces_[j].value(p.vertices_.col(v))) <=
                tol * (1.0 + p.vertices_.col(v).norm()))
                f.vertex_ids.push_back(v);
        if (affine_rank(p.vertices_, f.vertex_ids, 1e-9) != n - 1)
            throw DegenerateError("facet lost affine dimension after vertex filtering");
        p.facets_.push_back(std::move(f));
    }
    if (int(p.facets_.size()) < n + 1)
        throw DegenerateError("fewer than n+1 facets on a bounded polytope");
    return p;
}

bool Polytope::contains(const Vec& x, double tol) const {
    for (const auto& h : halfspaces_)
        if (h.value(x) < -tol) return false;
    return true;
}

double Polytope::inradius_at(const Vec& x) const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& h : halfspaces_) worst = std::min(worst, h.value(x) / h.normal.norm());
    return worst;
}

Vec Polytope::centroid() const { return vertices_.rowwise().mean(); }

double Polytope::diameter() const {
    double d = 0.0;
    for (int i = 0; i < vertices_.cols(); ++i)
        for (int j = i + 1; j < vertices_.cols(); ++j)
            d = std::max(d, (vertices_.col(i) - vertices_.col(j)).norm());
    return d;
}

bool Polytope::is_simple() const {
    for (int v = 0; v < vertices_.cols(); ++v) {
        int count = 0;
        for (const auto& f : facets_)
            if (std::find(f.vertex_ids.begin(), f.vertex_ids.end(), v) != f.vertex_ids.end())
                ++count;
        if (count != dim_) return false;
    }
    return true;
}

std::vector<Simplex> Polytope::triangulate_face(const std::vector<int>& ids, int face_dim) const {
    std::vector<Simplex> out;
    if (face_dim <= 0 || int(ids.size()) == face_dim + 1) {
        Simplex s;
        s.vertices.resize(dim_, ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) s.vertices.col(int(i)) = vertices_.col(ids[i]);
        s.measure = simplex_measure(s.vertices);
        out.push_back(std::move(s));
        return out;
    }
    // sub-facets: cut by the other facet hyperplanes, keep (face_dim-1)-cells
    std::set<std::vector<int>> seen;
    Vec c = Vec::Zero(dim_);
    for (int id : ids) c += vertices_.col(id);
    c /= double(ids.size());
    for (const auto& h : halfspaces_) {
        std::vector<int> sub;
        for (int id : ids)
            if (std::abs(h.value(vertices_.col(id))) <= tol_ * (1.0 + vertices_.col(id).norm()))
                sub.push_back(id);
        if (sub.size() == ids.size() || sub.empty()) continue;
        if (affine_rank(vertices_, sub, 1e-9) != face_dim - 1) continue;
        if (!seen.insert(sub).second) continue;
        for (auto& cell : triangulate_face(sub, face_dim - 1)) {
            Simplex s;
            s.vertices.resize(dim_, cell.vertices.cols() + 1);
            s.vertices.leftCols(cell.vertices.cols()) = cell.vertices;
            s.vertices.col(cell.vertices.cols()) = c;
            s.measure = simplex_measure(s.vertices);
            if (s.measure > 0.0) out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<std::pair<int, Simplex>> Polytope::boundary_triangulation() const {
    std::vector<std::pair<int, Simplex>> out;
    for (std::size_t j = 0; j < facets_.size(); ++j)
        for (auto& cell : triangulate_face(facets_[j].vertex_ids, dim_ - 1))
            out.emplace_back(int(j), std::move(cell));
    return out;
}

std::vector<Simplex> Polytope::triangulate() const {
    if (vertices_.cols() == dim_ + 1) {
        Simplex s;
        s.vertices = vertices_;
        s.measure = simplex_measure(s.vertices);
        return {s};
    }
    // cone each boundary cell to the centroid: interior and boundary
    // triangulations stay consistent
    Vec c = centroid();
    std::vector<Simplex> out;
    for (auto& [facet, cell] : boundary_triangulation()) {
        (void)facet;
        Simplex s;
        s.vertices.resize(dim_, cell.vertices.cols() + 1);
        s.vertices.leftCols(cell.vertices.cols()) = cell.vertices;
        s.vertices.col(cell.vertices.cols()) = c;
        s.measure = simplex_measure(s.vertices);
        if (s.measure > 0.0) out.push_back(std::move(s));
    }
    return out;
}

Polytope product(const Polytope& a, const Polytope& b) {
    const int n1 = a.dim_, n2 = b.dim_;
    std::vector<HalfSpace> hs;
    for (const auto& h : a.halfspaces_) {
        HalfSpace g;
        g.normal = Vec::Zero(n1 + n2);
        g.normal.head(n1) = h.normal;
        g.offset = h.offset;
        hs.push_back(std::move(g));
    }
    for (const auto& h : b.halfspaces_) {
        HalfSpace g;
        g.normal = Vec::Zero(n1 + n2);
        g.normal.tail(n2) = h.normal;
        g.offset = h.offset;
        hs.push_back(std::move(g));
    }
    return Polytope::from_halfspaces(std::move(hs), std::max(a.tol_, b.tol_));
}

ToricSystem make_system(Polytope polytope, double interior_density,
                        std::vector<double> facet_densities) {
    if (interior_density <= 0.0) throw DegenerateError("interior density must be positive");
    if (facet_densities.size() != polytope.facets().size())
        throw DegenerateError("facet density count does not match facet count");
    bool any = false;
    for (double d : facet_densities) {
        if (d < 0.0) throw DegenerateError("facet densities must be nonnegative");
        if (d > 0.0) any = true;
    }
    if (!any) throw DegenerateError("all facet densities vanish");

    ToricSystem s;
    s.polytope = std::move(polytope);
    s.interior_density = interior_density;
    s.facet_densities = std::move(facet_densities);
    s.interior_simplices = s.polytope.triangulate();
    s.boundary_simplices = s.polytope.boundary_triangulation();
    s.volume = 0.0;
    for (const auto& sim : s.interior_simplices) s.volume += sim.measure;
    s.volume *= s.interior_density;
    s.boundary_measure = 0.0;
    for (const auto& [facet, sim] : s.boundary_simplices)
        s.boundary_measure += sim.measure * s.facet_densities[facet];
    return s;
}

namespace {

// best rational approximation p/q with q <= qmax (continued fractions)
bool rationalize(double x, std::int64_t qmax, std::int64_t& p, std::int64_t& q, double tol) {
    double v = x;
    std::int64_t p0 = 1, q0 = 0, p1 = std::int64_t(std::floor(v)), q1 = 1;
    v -= std::floor(v);
    for (int it = 0; it < 64 && v > 1e-15; ++it) {
        v = 1.0 / v;
        double a = std::floor(v);
        if (a > double(qmax)) break;
        v -= a;
        std::int64_t p2 = std::int64_t(a) * p1 + p0;
        std::int64_t q2 = std::int64_t(a) * q1 + q0;
        if (q2 > qmax) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    p = p1;
    q = q1;
    return std::abs(x - double(p) / double(q)) <= tol;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    a = std::abs(a);
    b = std::abs(b);
    while (b) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

ToricSystem lattice_system(const Polytope& polytope, double tol) {
    const std::int64_t qmax = 1000000;
    std::vector<double> densities;
    for (const auto& f : polytope.facets()) {
        Vec a = polytope.halfspaces()[f.halfspace].normal;
        double amax = a.cwiseAbs().maxCoeff();
        Vec scaled = a / amax;
        std::int64_t common = 1;
        for (int i = 0; i < scaled.size(); ++i) {
            std::int64_t p, q;
            if (!rationalize(scaled(i), qmax, p, q, tol))
                throw IrrationalNormalError("facet normal has no small rational multiple");
            if (q != 0) common = common / gcd64(common, q) * q;
            if (common > qmax)
                throw IrrationalNormalError("common denominator exceeds bound 1e6");
        }
        Eigen::VectorXd z(scaled.size());
        for (int i = 0; i < scaled.size(); ++i) {
            double zi = scaled(i) * double(common);
            z(i) = std::round(zi);
            if (std::abs(zi - z(i)) > tol * double(common))
                throw IrrationalNormalError("normal is not proportional to an integer vector");
        }
        std::int64_t g = 0;
        for (int i = 0; i < z.size(); ++i) g = gcd64(g, std::int64_t(z(i)));
        if (g == 0) throw IrrationalNormalError("degenerate normal");
        z /= double(g);
        densities.push_back(1.0 / z.norm());
    }
    return make_system(polytope, 1.0, std::move(densities));
}

std::pair<double, double> total_measures(const ToricSystem& system) {
    return {system.volume, system.boundary_measure};
}

ToricSystem product(const ToricSystem& a, const ToricSystem& b) {
    Polytope pp = product(a.polytope, b.polytope);
    // facets of the product come out in order: facets of a (lifted), then
    // facets of b; from_halfspaces preserves the irredundant input order
    std::vector<double> dens;
    if (pp.facets().size() != a.polytope.facets().size() + b.polytope.facets().size())
        throw DegenerateError("product polytope facet count mismatch");
    for (std::size_t i = 0; i < a.polytope.facets().size(); ++i)
        dens.push_back(a.facet_densities[i] * b.interior_density);
    for (std::size_t i = 0; i < b.polytope.facets().size(); ++i)
        dens.push_back(a.interior_density * b.facet_densities[i]);
    return make_system(std::move(pp), a.interior_density * b.interior_density, std::move(dens));
}

double clipped_volume(const ToricSystem& system, const HalfSpace& cut) {
    std::vector<HalfSpace> hs = system.polytope.halfspaces();
    hs.push_back(cut);
    try {
        Polytope clipped = Polytope::from_halfspaces(std::move(hs), system.polytope.tol());
        double vol = 0.0;
        for (const auto& s : clipped.triangulate()) vol += s.measure;
        return vol * system.interior_density;
    } catch (const EmptyOrUnboundedError&) {
        return 0.0;
    } catch (const DegenerateError&) {
        return 0.0;
    }
}

}  // namespace muentropy
