#include "muentropy/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "muentropy/parallel.hpp"

namespace muentropy {

// ---------------------------------------------------------------------------
// surrogate objective

FreeEnergyObjective::FreeEnergyObjective(const ToricSystem& system, double T, int pieces,
                                         double beta, int mesh_order, int mesh_refine)
    : system_(&system),
      T_(T),
      beta_(beta),
      pieces_(pieces),
      dim_(system.dim()),
      vol_(volume_mesh(system, mesh_order, mesh_refine)),
      bdry_(boundary_mesh(system, mesh_order, mesh_refine)) {}

PiecewiseAffineConvex FreeEnergyObjective::to_pa(const std::vector<double>& theta) const {
    std::vector<AffineFn> pieces;
    for (int i = 0; i < pieces_; ++i) {
        AffineFn p;
        p.gradient.resize(dim_);
        for (int d = 0; d < dim_; ++d) p.gradient(d) = theta[std::size_t(i * (dim_ + 1) + d)];
        p.constant = theta[std::size_t(i * (dim_ + 1) + dim_)];
        pieces.push_back(std::move(p));
    }
    return PiecewiseAffineConvex(std::move(pieces));
}

std::vector<double> FreeEnergyObjective::from_pa(const PiecewiseAffineConvex& q, int pieces) {
    const int n = q.dim();
    std::vector<double> theta(std::size_t(pieces) * (n + 1), 0.0);
    for (int i = 0; i < pieces; ++i) {
        const AffineFn& p = q.pieces()[std::size_t(i) % q.pieces().size()];
        for (int d = 0; d < n; ++d) theta[std::size_t(i * (n + 1) + d)] = p.gradient(d);
        theta[std::size_t(i * (n + 1) + n)] = p.constant;
    }
    return theta;
}

namespace {

// smoothed-exponential moments of one mesh and their parameter gradients
struct MeshMoments {
    double mass = 0.0;  // sum w e^{q - M}
    double qmom = 0.0;  // sum w (q - M) e^{q - M}
    std::vector<double> d_mass;
    std::vector<double> d_qmom;
};

void accumulate(const QuadMesh& mesh, const std::vector<double>& theta, int pieces, int dim,
                double beta, double shift, bool with_qmom, bool with_grad, MeshMoments& out) {
    const int stride = dim + 1;
    out.mass = 0.0;
    out.qmom = 0.0;
    if (with_grad) {
        out.d_mass.assign(theta.size(), 0.0);
        out.d_qmom.assign(theta.size(), 0.0);
    }
    std::vector<double> vals(static_cast<std::size_t>(pieces), 0.0);
    std::vector<double> soft(static_cast<std::size_t>(pieces), 0.0);
    for (std::size_t node = 0; node < mesh.size(); ++node) {
        const double* x = mesh.point(node);
        const double w = mesh.weights[node];
        double m = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < pieces; ++i) {
            const double* th = theta.data() + std::size_t(i) * stride;
            double v = th[dim];
            for (int d = 0; d < dim; ++d) v += th[d] * x[d];
            vals[std::size_t(i)] = v;
            m = std::max(m, v);
        }
        double denom = 0.0;
        for (int i = 0; i < pieces; ++i) {
            soft[std::size_t(i)] = std::exp(beta * (vals[std::size_t(i)] - m));
            denom += soft[std::size_t(i)];
        }
        const double q = m + std::log(denom) / beta - shift;
        const double e = std::exp(q);
        out.mass += w * e;
        if (with_qmom) out.qmom += w * q * e;
        if (!with_grad) continue;
        const double we = w * e;
        const double weq = w * e * (1.0 + q);
        for (int i = 0; i < pieces; ++i) {
            const double s = soft[std::size_t(i)] / denom;
            if (s == 0.0) continue;
            double* dm = out.d_mass.data() + std::size_t(i) * stride;
            for (int d = 0; d < dim; ++d) dm[d] += we * s * x[d];
            dm[dim] += we * s;
            if (with_qmom) {
                double* dq = out.d_qmom.data() + std::size_t(i) * stride;
                for (int d = 0; d < dim; ++d) dq[d] += weq * s * x[d];
                dq[dim] += weq * s;
            }
        }
    }
}

double node_max(const QuadMesh& mesh, const std::vector<double>& theta, int pieces, int dim,
                double beta) {
    const int stride = dim + 1;
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t node = 0; node < mesh.size(); ++node) {
        const double* x = mesh.point(node);
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < pieces; ++i) {
            const double* th = theta.data() + std::size_t(i) * stride;
            double v = th[dim];
            for (int d = 0; d < dim; ++d) v += th[d] * x[d];
            best = std::max(best, v);
        }
        m = std::max(m, best + std::log(double(pieces)) / beta);
    }
    return m;
}

}  // namespace

double FreeEnergyObjective::value(const std::vector<double>& theta) const {
    MeshMoments volm, bdrym;
    double shift = std::max(node_max(vol_, theta, pieces_, dim_, beta_),
                            node_max(bdry_, theta, pieces_, dim_, beta_));
    accumulate(vol_, theta, pieces_, dim_, beta_, shift, T_ != 0.0, false, volm);
    accumulate(bdry_, theta, pieces_, dim_, beta_, shift, false, false, bdrym);
    double F = bdrym.mass / volm.mass;
    if (T_ != 0.0)
        F += T_ * (volm.qmom / volm.mass + std::log(system_->volume) - std::log(volm.mass));
    return F;
}

double FreeEnergyObjective::value_and_gradient(const std::vector<double>& theta,
                                               std::vector<double>& grad) const {
    MeshMoments volm, bdrym;
    double shift = std::max(node_max(vol_, theta, pieces_, dim_, beta_),
                            node_max(bdry_, theta, pieces_, dim_, beta_));
    accumulate(vol_, theta, pieces_, dim_, beta_, shift, true, true, volm);
    accumulate(bdry_, theta, pieces_, dim_, beta_, shift, false, true, bdrym);
    const double A = volm.mass, B = bdrym.mass, C = volm.qmom;
    grad.assign(theta.size(), 0.0);
    double F = B / A;
    for (std::size_t t = 0; t < theta.size(); ++t)
        grad[t] = (bdrym.d_mass[t] * A - B * volm.d_mass[t]) / (A * A);
    if (T_ != 0.0) {
        F += T_ * (C / A + std::log(system_->volume) - std::log(A));
        for (std::size_t t = 0; t < theta.size(); ++t)
            grad[t] += T_ * ((volm.d_qmom[t] * A - C * volm.d_mass[t]) / (A * A) -
                             volm.d_mass[t] / A);
    }
    return F;
}

// ---------------------------------------------------------------------------
// L-BFGS with Armijo backtracking (monotone accepted steps)

namespace {

struct LbfgsOutcome {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    // max increase across accepted steps; Armijo acceptance keeps this <= 0,
    // recorded as a regression guard
    double descent_violation = -std::numeric_limits<double>::infinity();
};

template <typename ValueGrad>
LbfgsOutcome lbfgs(ValueGrad&& fg, std::vector<double>& x, int max_iters, double grad_tol,
                   double step_tol, double f_tol) {
    const std::size_t n = x.size();
    const int memory = 10;
    std::vector<std::vector<double>> s_hist, y_hist;
    std::vector<double> rho_hist;
    std::vector<double> g(n), x_new(n), g_new(n), dir(n);
    LbfgsOutcome out;
    double f = fg(x, g);
    out.value = f;
    for (int iter = 0; iter < max_iters; ++iter) {
        out.iterations = iter;
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax <= grad_tol) {
            out.converged = true;
            break;
        }
        // two-loop recursion
        for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
        std::vector<double> alpha(s_hist.size());
        for (int h = int(s_hist.size()) - 1; h >= 0; --h) {
            double a = 0.0;
            for (std::size_t i = 0; i < n; ++i) a += s_hist[std::size_t(h)][i] * dir[i];
            a *= rho_hist[std::size_t(h)];
            alpha[std::size_t(h)] = a;
            for (std::size_t i = 0; i < n; ++i) dir[i] -= a * y_hist[std::size_t(h)][i];
        }
        if (!s_hist.empty()) {
            double sy = 0.0, yy = 0.0;
            const auto& s = s_hist.back();
            const auto& y = y_hist.back();
            for (std::size_t i = 0; i < n; ++i) {
                sy += s[i] * y[i];
                yy += y[i] * y[i];
            }
            double scale = sy / std::max(yy, 1e-300);
            for (std::size_t i = 0; i < n; ++i) dir[i] *= scale;
        }
        for (std::size_t h = 0; h < s_hist.size(); ++h) {
            double b = 0.0;
            for (std::size_t i = 0; i < n; ++i) b += y_hist[h][i] * dir[i];
            b *= rho_hist[h];
            for (std::size_t i = 0; i < n; ++i) dir[i] += (alpha[h] - b) * s_hist[h][i];
        }
        double descent = 0.0;
        for (std::size_t i = 0; i < n; ++i) descent += g[i] * dir[i];
        if (descent >= 0.0) {  // not a descent direction: reset to steepest
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            descent = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dir[i] = -g[i];
                descent -= g[i] * g[i];
            }
        }
        // Armijo backtracking
        double step = 1.0;
        double f_new = f;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * dir[i];
            f_new = fg(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * descent) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        double step_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            step_norm = std::max(step_norm, std::abs(step * dir[i]));
        std::vector<double> s_vec(n), y_vec(n);
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s_vec[i] = x_new[i] - x[i];
            y_vec[i] = g_new[i] - g[i];
            sy += s_vec[i] * y_vec[i];
        }
        if (sy > 1e-12) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (int(s_hist.size()) > memory) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
        }
        double improvement = f - f_new;
        out.descent_violation = std::max(out.descent_violation, f_new - f);
        x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        out.value = f;
        if (step_norm <= step_tol || improvement <= f_tol * 1e-6) {
            out.converged = true;
            break;
        }
    }
    out.value = f;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// linear-vector solver

namespace {

Vec futaki_vector(const ToricSystem& system, double lambda, const Vec& xi, double& value_out) {
    const int n = system.dim();
    double M = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < system.polytope.vertex_count(); ++v)
        M = std::max(M, xi.dot(system.polytope.vertex(v)));
    AffineFn l{xi, -M};  // shifted weight; the invariant is shift-free
    double A = integrate_volume_exp_affine(system, l);
    double B = integrate_boundary_exp_affine(system, l);
    double W = integrate_volume_affine_exp(system, l, l);
    double sbar = (2.0 * M_PI * B - lambda * W) / A;
    Vec G(n);
    for (int i = 0; i < n; ++i) {
        AffineFn coord{Vec::Zero(n), 0.0};
        coord.gradient(i) = 1.0;
        double Pi = integrate_volume_affine_exp(system, coord, l);
        double Pbi = integrate_boundary_affine_exp(system, coord, l);
        double Ri = integrate_volume_quadratic_exp(system, coord, l, l);
        G(i) = (2.0 * M_PI * Pbi - lambda * Ri) / A - sbar * Pi / A;
    }
    // sigma(<xi>) in shifted form: the shift cancels between the two terms
    double sigma = double(n) + W / A - std::log(A);
    value_out = -2.0 * M_PI * B / A + lambda * sigma;
    return G;
}

}  // namespace

VectorOptResult optimize_vector(const ToricSystem& system, double lambda, const Vec& xi0,
                                double residual_tol, int max_iters) {
    const int n = system.dim();
    VectorOptResult res;
    res.xi = xi0.size() == n ? xi0 : Vec(Vec::Zero(n));
    double value = 0.0;
    Vec G = futaki_vector(system, lambda, res.xi, value);
    double gn = G.cwiseAbs().maxCoeff();
    for (int iter = 0; iter < max_iters; ++iter) {
        res.iterations = iter;
        if (gn <= residual_tol) break;
        Mat J(n, n);
        const double h = 1e-6 * (1.0 + res.xi.norm());
        for (int j = 0; j < n; ++j) {
            Vec xp = res.xi, xm = res.xi;
            xp(j) += h;
            xm(j) -= h;
            double dummy = 0.0;
            J.col(j) = (futaki_vector(system, lambda, xp, dummy) -
                        futaki_vector(system, lambda, xm, dummy)) /
                       (2.0 * h);
        }
        Eigen::FullPivLU<Mat> lu(J);
        lu.setThreshold(1e-14);
        Vec step = lu.isInvertible() ? Vec(lu.solve(-G)) : Vec(-G);
        double t = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 30; ++bt) {
            Vec trial = res.xi + t * step;
            double trial_value = 0.0;
            Vec Gt = futaki_vector(system, lambda, trial, trial_value);
            double gt = Gt.cwiseAbs().maxCoeff();
            if (gt < gn) {
                res.xi = trial;
                G = Gt;
                gn = gt;
                value = trial_value;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    res.residual = gn;
    res.value = value;
    res.converged = gn <= residual_tol;
    return res;
}

// ---------------------------------------------------------------------------
// PA solver

namespace {

std::vector<int> piece_schedule(int max_pieces) {
    std::vector<int> schedule;
    for (int k : {1, 3, 6, 10})
        if (k < max_pieces) schedule.push_back(k);
    schedule.push_back(max_pieces);
    return schedule;
}

std::vector<double> expand_pieces(const std::vector<double>& theta, int old_k, int new_k, int dim,
                                  Rng& rng, double scale) {
    const int stride = dim + 1;
    std::vector<double> out(std::size_t(new_k) * stride);
    for (int i = 0; i < new_k; ++i) {
        const double* src = theta.data() + std::size_t(i % old_k) * stride;
        double* dst = out.data() + std::size_t(i) * stride;
        for (int d = 0; d <= dim; ++d) dst[d] = src[d];
        if (i >= old_k) {
            for (int d = 0; d < dim; ++d) dst[d] += 0.05 * scale * rng.normal();
            dst[dim] += 0.01 * rng.normal();
        }
    }
    return out;
}

void gauge_fix(std::vector<double>& theta, int pieces, int dim) {
    const int stride = dim + 1;
    double cmax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < pieces; ++i)
        cmax = std::max(cmax, theta[std::size_t(i) * stride + dim]);
    for (int i = 0; i < pieces; ++i) theta[std::size_t(i) * stride + dim] -= cmax;
}

bool pieces_collapsed(const std::vector<double>& theta, int pieces, int dim) {
    const int stride = dim + 1;
    for (int i = 1; i < pieces; ++i)
        for (int d = 0; d <= dim; ++d)
            if (std::abs(theta[std::size_t(i) * stride + d] - theta[std::size_t(d)]) > 1e-12)
                return false;
    return true;
}

struct StartOutcome {
    PiecewiseAffineConvex q;
    FunctionalReport report;
    bool converged = false;
    int iterations = 0;
    double surrogate = 0.0;
    double descent_violation = -std::numeric_limits<double>::infinity();
};

PiecewiseAffineConvex pa_from_theta(const std::vector<double>& theta, int pieces, int dim) {
    std::vector<AffineFn> out;
    for (int i = 0; i < pieces; ++i) {
        AffineFn p;
        p.gradient.resize(dim);
        for (int d = 0; d < dim; ++d) p.gradient(d) = theta[std::size_t(i * (dim + 1) + d)];
        p.constant = theta[std::size_t(i * (dim + 1) + dim)];
        out.push_back(std::move(p));
    }
    return PiecewiseAffineConvex(std::move(out));
}

// one multi-stage descent over (pieces, sharpness, temperature) schedules;
// init: nullptr = random pieces, empty PA = zero start, else warm shape
StartOutcome run_start(const ToricSystem& system, const std::vector<double>& temp_schedule,
                       const SolverConfig& cfg, Rng rng, const PiecewiseAffineConvex* init) {
    const int n = system.dim();
    const double scale = 2.0 / std::max(system.polytope.diameter(), 1e-9);
    StartOutcome out;
    std::vector<int> kschedule = piece_schedule(cfg.pieces);
    if (init && !init->empty()) {
        // start at (and never below) the warm shape's piece count
        int k0 = std::min(cfg.pieces, std::max(1, int(init->pieces().size())));
        std::vector<int> filtered;
        filtered.push_back(k0);
        for (int k : kschedule)
            if (k > k0) filtered.push_back(k);
        kschedule = std::move(filtered);
    }
    int k = kschedule.front();
    std::vector<double> theta(std::size_t(k) * (n + 1), 0.0);
    if (init && !init->empty()) {
        theta = FreeEnergyObjective::from_pa(*init, k);
    } else if (!init) {
        for (int i = 0; i < k; ++i)
            for (int d = 0; d < n; ++d)
                theta[std::size_t(i) * (n + 1) + d] = scale * rng.normal();
    }
    double T_head = temp_schedule.front();
    bool converged = true;
    int total_iters = 0;
    double surrogate = 0.0;
    for (std::size_t ks = 0; ks < kschedule.size(); ++ks) {
        int new_k = kschedule[ks];
        if (new_k != k) {
            theta = expand_pieces(theta, k, new_k, n, rng, scale);
            k = new_k;
        }
        FreeEnergyObjective obj(system, T_head, k, cfg.sharpness_schedule.back(),
                                cfg.mesh_order, cfg.mesh_refine);
        std::vector<double> betas = cfg.sharpness_schedule;
        if (k == 1) betas = {cfg.sharpness_schedule.back()};  // single piece: exact already
        for (double beta : betas) {
            if (k > 1 && pieces_collapsed(theta, k, n) && beta != betas.back()) continue;
            obj.set_sharpness(beta);
            auto fg = [&](const std::vector<double>& x, std::vector<double>& g) {
                return obj.value_and_gradient(x, g);
            };
            auto res = lbfgs(fg, theta, cfg.max_iters, cfg.grad_tol, cfg.step_tol, cfg.f_tol);
            total_iters += res.iterations;
            surrogate = res.value;
            converged = res.converged;
            out.descent_violation = std::max(out.descent_violation, res.descent_violation);
            gauge_fix(theta, k, n);
        }
    }
    // temperature continuation (used by the T = 0 tie-break)
    for (std::size_t ts = 1; ts < temp_schedule.size(); ++ts) {
        FreeEnergyObjective obj(system, temp_schedule[ts], k, cfg.sharpness_schedule.back(),
                                cfg.mesh_order, cfg.mesh_refine);
        auto fg = [&](const std::vector<double>& x, std::vector<double>& g) {
            return obj.value_and_gradient(x, g);
        };
        auto res = lbfgs(fg, theta, cfg.max_iters, cfg.grad_tol, cfg.step_tol, cfg.f_tol);
        total_iters += res.iterations;
        surrogate = res.value;
        converged = res.converged;
        out.descent_violation = std::max(out.descent_violation, res.descent_violation);
        gauge_fix(theta, k, n);
    }
    out.q = pa_from_theta(theta, k, n).pruned(system.polytope);
    out.report = functional_report(system, temp_schedule.back(), out.q, cfg.report_quadrature);
    out.converged = converged;
    out.iterations = total_iters;
    out.surrogate = surrogate;
    return out;
}

OptResult solve_multistart(const ToricSystem& system, const std::vector<double>& temp_schedule,
                           const SolverConfig& cfg) {
    // zero start + warm starts + random starts
    const int warm = int(cfg.warm_starts.size());
    const int total = 1 + warm + cfg.starts;
    static const PiecewiseAffineConvex zero_shape{};
    const std::size_t total_starts = static_cast<std::size_t>(total);
    std::vector<StartOutcome> outcomes(total_starts);
    Rng root(cfg.seed);
    parallel_for(std::size_t(total), [&](std::size_t s) {
        const PiecewiseAffineConvex* init = nullptr;
        if (s == 0)
            init = &zero_shape;
        else if (int(s) <= warm)
            init = &cfg.warm_starts[s - 1];
        outcomes[s] = run_start(system, temp_schedule, cfg, root.split(s), init);
    });
    // merge: min F, then max S within f_tol
    int best = 0;
    for (int s = 1; s < total; ++s) {
        const auto& a = outcomes[std::size_t(s)].report;
        const auto& b = outcomes[std::size_t(best)].report;
        if (a.F < b.F - cfg.f_tol || (a.F <= b.F + cfg.f_tol && a.S > b.S)) best = s;
    }
    OptResult out;
    out.q_star = outcomes[std::size_t(best)].q;
    out.u_star = normalize(system, out.q_star, cfg.report_quadrature);
    out.report = outcomes[std::size_t(best)].report;
    out.converged = outcomes[std::size_t(best)].converged;
    out.iterations = outcomes[std::size_t(best)].iterations;
    out.surrogate_value = outcomes[std::size_t(best)].surrogate;
    out.descent_violation = -std::numeric_limits<double>::infinity();
    for (const auto& o : outcomes)
        out.descent_violation = std::max(out.descent_violation, o.descent_violation);
    double agree = 0.0;
    for (int s = 0; s < total; ++s) {
        out.start_results.push_back(outcomes[std::size_t(s)].q);
        for (int t = s + 1; t < total; ++t)
            agree = std::max(agree, std::abs(outcomes[std::size_t(s)].report.F -
                                             outcomes[std::size_t(t)].report.F));
    }
    out.starts_agreement = agree;
    return out;
}

}  // namespace

OptResult minimize_free_energy(const ToricSystem& system, double T, const SolverConfig& cfg) {
    // for T < 0 the functional is concave along mixtures and minimization is
    // not the posed problem
    if (T < 0.0) throw Error("free-energy minimization requires T >= 0");
    return solve_multistart(system, {T}, cfg);
}

OptResult canonical_distribution(const ToricSystem& system, double T, const SolverConfig& cfg) {
    if (T > 0.0) return minimize_free_energy(system, T, cfg);
    if (T < 0.0) throw Error("canonical distributions are defined for T >= 0");
    // ground state with entropy tie-break via temperature continuation
    return solve_multistart(system, {1e-2, 1e-3, 1e-4, 0.0}, cfg);
}

// ---------------------------------------------------------------------------
// semistability battery

SemistabilityVerdict semistability_check(const ToricSystem& system, double lambda, const Vec& xi,
                                         int trials, std::uint64_t seed) {
    const int n = system.dim();
    const Polytope& P = system.polytope;
    std::vector<PiecewiseAffineConvex> battery;
    // signed coordinate linears: all nonzero sign patterns in {-1,0,1}^n
    {
        std::vector<int> pattern(std::size_t(n), -1);
        for (;;) {
            Vec g(n);
            bool nonzero = false;
            for (int d = 0; d < n; ++d) {
                g(d) = pattern[std::size_t(d)];
                if (pattern[std::size_t(d)] != 0) nonzero = true;
            }
            if (nonzero) battery.push_back(linear_from_vector(g));
            int d = 0;
            while (d < n && ++pattern[std::size_t(d)] > 1) pattern[std::size_t(d++)] = -1;
            if (d == n) break;
        }
    }
    // facet-offset hinges max(0, +-(l_F - c)) at interior offsets
    for (const auto& h : P.halfspaces()) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int v = 0; v < P.vertex_count(); ++v) {
            double val = h.value(P.vertex(v));
            lo = std::min(lo, val);
            hi = std::max(hi, val);
        }
        for (double frac : {0.2, 0.4, 0.6, 0.8}) {
            double c = lo + frac * (hi - lo);
            battery.push_back(PiecewiseAffineConvex(
                {AffineFn{Vec::Zero(n), 0.0}, AffineFn{h.normal, h.offset - c}}));
            battery.push_back(PiecewiseAffineConvex(
                {AffineFn{Vec::Zero(n), 0.0}, AffineFn{-h.normal, c - h.offset}}));
        }
    }
    Rng root(seed);
    for (int t = 0; t < trials; ++t) {
        Rng rng = root.split(std::uint64_t(t));
        battery.push_back(random_nonneg_convex(P, rng));
    }
    SemistabilityVerdict verdict;
    verdict.trials_run = int(battery.size());
    std::vector<double> futs(battery.size());
    parallel_for(battery.size(), [&](std::size_t i) {
        futs[i] = futaki(system, lambda, xi, battery[i]);
    });
    verdict.worst_futaki = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < battery.size(); ++i) {
        if (futs[i] < verdict.worst_futaki) {
            verdict.worst_futaki = futs[i];
            verdict.witness = battery[i];
        }
    }
    verdict.destabilized = verdict.worst_futaki < -1e-8;
    return verdict;
}

}  // namespace muentropy
