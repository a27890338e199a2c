#include <cmath>

#include "doctest.h"
#include "muentropy/state.hpp"
#include "test_systems.hpp"

using namespace muentropy;
using namespace fixtures;

namespace {
const double kE = std::exp(1.0);
}

TEST_CASE("normalize basics and gauge invariance") {
    ToricSystem seg = segment_sys(0, 1);
    PiecewiseAffineConvex q = linear_from_vector(pt({1.0}));
    State u = normalize(seg, q);
    // u(x) = e^x/(e-1)
    CHECK(u.density(pt({0.0})) == doctest::Approx(1.0 / (kE - 1.0)).epsilon(1e-10));
    CHECK(u.density(pt({1.0})) == doctest::Approx(kE / (kE - 1.0)).epsilon(1e-10));
    CHECK(u.log_normalizer() == doctest::Approx(std::log(kE - 1.0)).epsilon(1e-10));
    CHECK(state_mass(seg, u) == doctest::Approx(1.0).epsilon(1e-9));

    // q = 0 and q = const give u == 1
    ToricSystem bl = blowup_sys();
    State one = normalize(bl, linear_from_vector(pt({0.0, 0.0})));
    State one_shift = normalize(bl, PiecewiseAffineConvex({AffineFn{pt({0.0, 0.0}), 7.5}}));
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        Vec x = sample_point(bl.polytope, rng);
        CHECK(one.density(x) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(one.density(x) - one_shift.density(x)) < 1e-12);
    }
}

TEST_CASE("gauge invariance on random PA functions") {
    ToricSystem bl = blowup_sys();
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Rng sub = rng.split(trial);
        PiecewiseAffineConvex q = random_nonneg_convex(bl.polytope, sub);
        double c = sub.uniform(-5, 5);
        State a = normalize(bl, q);
        State b = normalize(bl, q.shifted(c));
        for (int i = 0; i < 20; ++i) {
            Vec x = sample_point(bl.polytope, sub);
            CHECK(std::abs(a.density(x) - b.density(x)) <= 1e-12 * (1.0 + a.density(x)));
        }
    }
}

TEST_CASE("mixture endpoints, normalization, log-convexity") {
    ToricSystem seg = segment_sys(0, 1);
    State u0 = normalize(seg, linear_from_vector(pt({0.0})));
    State u1 = normalize(seg, linear_from_vector(pt({1.0})));
    CHECK(mixture(u0, u1, 0.0).terms().size() == 1);
    CHECK(mixture(u0, u1, 1.0).log_normalizer() == doctest::Approx(u1.log_normalizer()));

    State um = mixture(u0, u1, 0.5);
    // u(x) = (1 + e^x/(e-1))/2, normalized
    CHECK(um.density(pt({0.0})) ==
          doctest::Approx(0.5 * (1.0 + 1.0 / (kE - 1.0))).epsilon(1e-10));
    CHECK(state_mass(seg, um) == doctest::Approx(1.0).epsilon(1e-9));

    // log-convexity via midpoint sampling on random mixtures
    ToricSystem bl = blowup_sys();
    Rng rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        Rng sub = rng.split(trial);
        State a = normalize(bl, random_nonneg_convex(bl.polytope, sub));
        State b = normalize(bl, random_nonneg_convex(bl.polytope, sub));
        State m = mixture(a, b, sub.uniform(0.05, 0.95));
        for (int i = 0; i < 40; ++i) {
            Vec x = sample_point(bl.polytope, sub), y = sample_point(bl.polytope, sub);
            double lhs = m.density(0.5 * (x + y));
            double rhs = std::sqrt(m.density(x) * m.density(y));
            CHECK(lhs * lhs <= m.density(x) * m.density(y) * (1.0 + 1e-9) + 1e-300);
            (void)rhs;
        }
    }
}

TEST_CASE("smoothed surrogate brackets its base") {
    ToricSystem bl = blowup_sys();
    Rng rng(71);
    for (int t = 0; t < 10; ++t) {
        Rng sub = rng.split(t);
        PiecewiseAffineConvex q = random_nonneg_convex(bl.polytope, sub);
        const double m = double(q.pieces().size());
        for (double beta : {4.0, 64.0, 1024.0}) {
            SmoothedConvex s{q, beta};
            for (int i = 0; i < 30; ++i) {
                Vec x = sample_point(bl.polytope, sub);
                CHECK(s(x) >= q(x) - 1e-12);
                CHECK(s(x) <= q(x) + std::log(m) / beta + 1e-12);
            }
        }
        // pointwise convergence as beta grows
        Vec x = sample_point(bl.polytope, sub);
        CHECK(SmoothedConvex{q, 1e6}(x) == doctest::Approx(q(x)).epsilon(1e-9));
    }
}

TEST_CASE("pa_min_over is exact on known cases") {
    Polytope sq = box2(-1, 1);
    // |x| + |y| style bowl: min 0 at origin
    PiecewiseAffineConvex bowl({AffineFn{pt({1, 1}), 0}, AffineFn{pt({-1, 1}), 0},
                                AffineFn{pt({1, -1}), 0}, AffineFn{pt({-1, -1}), 0}});
    CHECK(pa_min_over(sq, bowl) == doctest::Approx(0.0).epsilon(1e-12));
    // affine: min at a vertex
    PiecewiseAffineConvex lin({AffineFn{pt({2, -1}), 3}});
    CHECK(pa_min_over(sq, lin) == doctest::Approx(3 - 2 - 1).epsilon(1e-12));
}

TEST_CASE("random convex generator is nonnegative with zero min") {
    Polytope bl = blowup_quad();
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        Rng sub = rng.split(trial);
        PiecewiseAffineConvex q = random_nonneg_convex(bl, sub);
        CHECK(pa_min_over(bl, q) == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(midpoint_convexity_defect(q, bl, sub, 100) <= 1e-10);
    }
}

TEST_CASE("tight envelope of affine is itself; hinge is already tight") {
    ToricSystem seg = segment_sys(0, 1);
    PiecewiseAffineConvex lin({AffineFn{pt({2.0}), -0.3}});
    PiecewiseAffineConvex env = tight_envelope(seg, lin, 16);
    Rng rng(23);
    for (int i = 0; i < 50; ++i) {
        Vec x = sample_point(seg.polytope, rng);
        CHECK(env(x) == doctest::Approx(lin(x)).epsilon(1e-9));
    }

    // in 1-D the boundary is two points, so the envelope of a hinge is the
    // chord through its endpoint values
    PiecewiseAffineConvex hinge({AffineFn{pt({0.0}), 0.0}, AffineFn{pt({2.0}), -1.0}});
    PiecewiseAffineConvex env2 = tight_envelope(seg, hinge, 32);
    for (int i = 0; i < 50; ++i) {
        Vec x = sample_point(seg.polytope, rng);
        CHECK(env2(x) == doctest::Approx(x(0) * hinge(pt({1.0}))).epsilon(1e-8));
    }

    // envelope dominates q in the interior
    ToricSystem bl = blowup_sys();
    PiecewiseAffineConvex q = random_nonneg_convex(bl.polytope, rng);
    PiecewiseAffineConvex env3 = tight_envelope(bl, q, 12);
    for (int i = 0; i < 100; ++i) {
        Vec x = sample_point(bl.polytope, rng);
        CHECK(env3(x) >= q(x) - 1e-8);
    }
}

TEST_CASE("vertex truncation on the blowup quadrilateral") {
    ToricSystem bl = blowup_sys();
    Vec v = pt({0, -1});
    // steep cone peaking at v with apex value 10, negative on the rest of P
    PiecewiseAffineConvex q({AffineFn{pt({0, 0}), 0.0}, AffineFn{pt({-40, -60}), -50.0}});
    double qv = q(v);
    CHECK(qv == doctest::Approx(10.0));

    auto res = vertex_truncate_ex(bl, q, v, 5.0);
    CHECK(res.q(v) == doctest::Approx(5.0).epsilon(1e-9));
    CHECK((res.touch0 - pt({0.25, -1.0})).norm() +
              (res.touch1 - pt({-0.5, -0.5})).norm() <
          1e-9 + 1.0);  // touch points land on the two edges
    // below q everywhere, equal outside the triangle
    Rng rng(31);
    for (int i = 0; i < 300; ++i) {
        Vec x = sample_point(bl.polytope, rng);
        CHECK(res.q(x) <= q(x) + 1e-9);
        // outside the contact triangle the function is unchanged
        Mat T(2, 3);
        T.col(0) = v;
        T.col(1) = res.touch0;
        T.col(2) = res.touch1;
        Eigen::Matrix2d E;
        E.col(0) = T.col(1) - T.col(0);
        E.col(1) = T.col(2) - T.col(0);
        Vec bc = E.inverse() * (x - v);
        bool inside = bc(0) >= -1e-9 && bc(1) >= -1e-9 && bc(0) + bc(1) <= 1 + 1e-9;
        if (!inside) CHECK(res.q(x) == doctest::Approx(q(x)).epsilon(1e-9));
    }

    // h = q(v): unchanged
    auto same = vertex_truncate_ex(bl, q, v, qv);
    for (int i = 0; i < 50; ++i) {
        Vec x = sample_point(bl.polytope, rng);
        CHECK(same.q(x) == doctest::Approx(q(x)).epsilon(1e-12));
    }

    // affine q: no supporting plane can dip below at v only
    PiecewiseAffineConvex lin({AffineFn{pt({0.5, -0.25}), 1.0}});
    CHECK_THROWS_AS(vertex_truncate(bl, lin, v, lin(v) - 1.0), SlopeConditionError);
}
