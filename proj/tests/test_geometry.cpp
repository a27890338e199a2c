#include <cmath>

#include "doctest.h"
#include "muentropy/geometry.hpp"
#include "muentropy/rng.hpp"
#include "test_systems.hpp"

using namespace muentropy;
using namespace fixtures;

TEST_CASE("blowup quadrilateral vertices and facets") {
    Polytope p = blowup_quad();
    CHECK(p.dim() == 2);
    CHECK(p.vertex_count() == 4);
    CHECK(p.facets().size() == 4);
    // expected vertex set
    std::vector<Vec> expected = {pt({0, -1}), pt({2, -1}), pt({-1, 2}), pt({-1, 0})};
    for (const auto& e : expected) {
        bool found = false;
        for (int i = 0; i < p.vertex_count(); ++i)
            if ((p.vertex(i) - e).norm() < 1e-9) found = true;
        CHECK(found);
    }
    CHECK(p.is_simple());
}

TEST_CASE("interval and box") {
    Polytope seg = segment(0, 1);
    CHECK(seg.dim() == 1);
    CHECK(seg.vertex_count() == 2);
    CHECK(seg.facets().size() == 2);

    Polytope sq = box2(0, 1);
    CHECK(sq.vertex_count() == 4);
    CHECK(sq.facets().size() == 4);
    CHECK(sq.is_simple());
}

TEST_CASE("redundant halfspace dropped") {
    auto hs_list = std::vector<HalfSpace>{hs({1, 0}, 0), hs({-1, 0}, 1), hs({0, 1}, 0),
                                          hs({0, -1}, 1), hs({-1, -1}, 5)};  // x+y <= 5 redundant
    Polytope p = Polytope::from_halfspaces(hs_list);
    CHECK(p.facets().size() == 4);
}

TEST_CASE("vertex-touching and duplicate halfspaces") {
    // x + y <= 2 touches the unit square only at (1,1): weakly redundant
    Polytope p = Polytope::from_halfspaces({hs({1, 0}, 0), hs({-1, 0}, 1), hs({0, 1}, 0),
                                            hs({0, -1}, 1), hs({-1, -1}, 2)});
    CHECK(p.facets().size() == 4);
    CHECK(p.vertex_count() == 4);
    bool corner = false;
    for (int v = 0; v < p.vertex_count(); ++v)
        if ((p.vertex(v) - pt({1, 1})).norm() < 1e-9) corner = true;
    CHECK(corner);

    // exact duplicates (including positive rescaling) collapse to one facet
    Polytope q = Polytope::from_halfspaces({hs({1, 0}, 0), hs({2, 0}, 0), hs({-1, 0}, 1),
                                            hs({0, 1}, 0), hs({0, -1}, 1), hs({0, -3}, 3)});
    CHECK(q.facets().size() == 4);

    // a segment-contact cut is a genuine facet (corner truncation)
    Polytope r = Polytope::from_halfspaces({hs({1, 0}, 0), hs({-1, 0}, 1), hs({0, 1}, 0),
                                            hs({0, -1}, 1), hs({-1, -1}, 1.5)});
    CHECK(r.facets().size() == 5);
    CHECK(r.vertex_count() == 5);
}

TEST_CASE("random bounded polytopes stay consistent") {
    Rng rng(0xf00d);
    int built = 0;
    for (int trial = 0; trial < 60; ++trial) {
        Rng sub = rng.split(trial);
        int n = 2 + int(sub.below(2));  // dimensions 2 and 3
        // random cuts around the origin plus a bounding box
        std::vector<HalfSpace> cuts;
        for (int d = 0; d < n; ++d) {
            Vec e = Vec::Zero(n);
            e(d) = 1.0;
            cuts.push_back(HalfSpace{e, 2.0});
            cuts.push_back(HalfSpace{-e, 2.0});
        }
        int extra = 3 + int(sub.below(6));
        for (int i = 0; i < extra; ++i) {
            Vec g(n);
            for (int d = 0; d < n; ++d) g(d) = sub.normal();
            if (g.norm() < 1e-6) continue;
            g.normalize();
            cuts.push_back(HalfSpace{-g, sub.uniform(0.4, 2.5)});  // g.x <= offset
        }
        Polytope p = Polytope::from_halfspaces(cuts);
        ++built;
        // duality: vertices satisfy all constraints; facets span n-1 dims
        for (int v = 0; v < p.vertex_count(); ++v) CHECK(p.contains(p.vertex(v), 1e-8));
        for (const auto& f : p.facets()) CHECK(int(f.vertex_ids.size()) >= n);
        // triangulation measures a positive volume
        ToricSystem sys = make_system(p, 1.0,
                                      std::vector<double>(p.facets().size(), 1.0));
        CHECK(sys.volume > 0.0);
        // volume splits exactly across a random cut
        Vec d(n);
        for (int k = 0; k < n; ++k) d(k) = sub.normal();
        d.normalize();
        Vec c = p.centroid();
        double a = clipped_volume(sys, HalfSpace{d, -d.dot(c)});
        double b = clipped_volume(sys, HalfSpace{-d, d.dot(c)});
        CHECK(a + b == doctest::Approx(sys.volume).epsilon(1e-9));
    }
    CHECK(built == 60);
}

TEST_CASE("empty or unbounded detection") {
    CHECK_THROWS_AS(Polytope::from_halfspaces({hs({1, 0}, 0), hs({0, 1}, 0)}),
                    EmptyOrUnboundedError);  // quadrant, unbounded
    CHECK_THROWS_AS(
        Polytope::from_halfspaces({hs({1, 0}, 0), hs({-1, 0}, -1), hs({0, 1}, 0), hs({0, -1}, 1)}),
        EmptyOrUnboundedError);  // x >= 0 and x <= -1
    CHECK_THROWS_AS(
        Polytope::from_halfspaces({hs({1, 0}, 0), hs({-1, 0}, 0), hs({0, 1}, 0), hs({0, -1}, 1)}),
        EmptyOrUnboundedError);  // flat slab x == 0
}

TEST_CASE("square pyramid is not simple") {
    Polytope p = square_pyramid();
    CHECK(p.dim() == 3);
    CHECK(p.vertex_count() == 5);
    CHECK(p.facets().size() == 5);
    CHECK_FALSE(p.is_simple());
}

TEST_CASE("lattice measures") {
    ToricSystem bl = blowup_sys();
    auto [vol, bdry] = total_measures(bl);
    CHECK(vol == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(bdry == doctest::Approx(8.0).epsilon(1e-12));

    // the x+y=1 edge has Euclidean length 3*sqrt(2) and lattice measure 3
    for (std::size_t f = 0; f < bl.polytope.facets().size(); ++f) {
        const auto& h = bl.polytope.halfspaces()[f];
        if (std::abs(h.normal(0) + 1) < 1e-12 && std::abs(h.normal(1) + 1) < 1e-12) {
            double facet_measure = 0.0;
            for (const auto& [fi, s] : bl.boundary_simplices)
                if (fi == int(f)) facet_measure += s.measure * bl.facet_densities[fi];
            CHECK(facet_measure == doctest::Approx(3.0).epsilon(1e-12));
        }
    }

    ToricSystem sq = unit_square_sys();
    auto [v2, b2] = total_measures(sq);
    CHECK(v2 == doctest::Approx(1.0));
    CHECK(b2 == doctest::Approx(4.0));

    ToricSystem seg = segment_sys(-1, 1);
    auto [v3, b3] = total_measures(seg);
    CHECK(v3 == doctest::Approx(2.0));
    CHECK(b3 == doctest::Approx(2.0));  // endpoint masses 1 each
}

TEST_CASE("lattice normal recovery rejects irrational normals") {
    auto p = Polytope::from_halfspaces(
        {hs({1, 0}, 0), hs({0, 1}, 0), hs({-1, -std::sqrt(2.0)}, 2)});
    CHECK_THROWS_AS(lattice_system(p), IrrationalNormalError);
}

TEST_CASE("triangulation partitions the polytope") {
    ToricSystem bl = blowup_sys();
    double area = 0.0;
    for (const auto& s : bl.interior_simplices) {
        CHECK(s.measure > 0.0);
        area += s.measure;
    }
    CHECK(area == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(bl.interior_simplices.size() == 4);  // centroid fan over 4 edges

    ToricSystem seg = segment_sys(0, 1);
    CHECK(seg.interior_simplices.size() == 1);  // a simplex triangulates itself

    // pyramid: fan over 5 facets
    ToricSystem pyr = make_system(square_pyramid(), 1.0, std::vector<double>(5, 1.0));
    double vol = 0.0;
    for (const auto& s : pyr.interior_simplices) vol += s.measure;
    // vol = integral over z of (2-2z)^2 from 0..1 = 4/3
    CHECK(vol == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("products obey Fubini and boxplus") {
    ToricSystem seg = segment_sys(-1, 1);
    ToricSystem sq = product(seg, seg);
    auto [v, b] = total_measures(sq);
    CHECK(v == doctest::Approx(4.0));
    CHECK(b == doctest::Approx(8.0));  // 2*2 + 2*2

    ToricSystem bl = blowup_sys();
    ToricSystem prism = product(bl, seg);
    auto [v2, b2] = total_measures(prism);
    CHECK(v2 == doctest::Approx(8.0));
    CHECK(b2 == doctest::Approx(24.0));  // 8*2 + 4*2
    CHECK(prism.polytope.is_simple());

    // product laws hold exactly for a non-lattice pair too
    ToricSystem a = make_system(blowup_quad(), 2.0, {0.5, 1.0, 0.25, 2.0});
    ToricSystem c = product(a, seg);
    auto [va, ba] = total_measures(a);
    CHECK(total_measures(c).first == doctest::Approx(va * 2.0).epsilon(1e-12));
    CHECK(total_measures(c).second == doctest::Approx(ba * 2.0 + va * 2.0).epsilon(1e-12));
}

TEST_CASE("facet measures invariant under unimodular maps") {
    // x -> A x + t with A in GL_2(Z)
    Eigen::Matrix2d A;
    A << 2, 1, 1, 1;  // det 1
    Vec t = pt({3, -2});
    Polytope bl = blowup_quad();
    // transformed halfspaces: l(A^{-1}(x - t)) >= 0
    Eigen::Matrix2d Ainv = A.inverse();
    std::vector<HalfSpace> hs2;
    for (const auto& h : bl.halfspaces()) {
        Vec n2 = Ainv.transpose() * h.normal;
        hs2.push_back(HalfSpace{n2, h.offset - n2.dot(t)});
    }
    ToricSystem sys1 = lattice_system(bl);
    ToricSystem sys2 = lattice_system(Polytope::from_halfspaces(hs2));
    auto [v1, b1] = total_measures(sys1);
    auto [v2, b2] = total_measures(sys2);
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-10));
    CHECK(b1 == doctest::Approx(b2).epsilon(1e-10));
}

TEST_CASE("vertex facet duality within tolerance") {
    for (const Polytope& p : {blowup_quad(), box2(-1, 1), square_pyramid()}) {
        for (int v = 0; v < p.vertex_count(); ++v)
            CHECK(p.contains(p.vertex(v), 1e-9));
        for (const auto& f : p.facets())
            CHECK(int(f.vertex_ids.size()) >= p.dim());
    }
}

TEST_CASE("clipped volume halves the square through its center") {
    ToricSystem sq = unit_square_sys();
    Vec n = pt({1.0, 0.3});
    Vec c = pt({0.5, 0.5});
    double v = clipped_volume(sq, HalfSpace{n, -n.dot(c)});
    double w = clipped_volume(sq, HalfSpace{-n, n.dot(c)});
    CHECK(v + w == doctest::Approx(1.0).epsilon(1e-10));
}
