#include <hommap/dynamics.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hommap;

namespace {

const MapParams2D std2{-2.5, 1.0};

} // namespace

TEST(Orbit, OriginIsConstant)
{
    auto o = iterate_orbit(std2, Point2D{0.0, 0.0}, 50);
    EXPECT_FALSE(o.escaped);
    ASSERT_EQ(o.points.size(), 51u);
    for (const auto& p : o.points)
        EXPECT_EQ(p, (Point2D{0.0, 0.0}));
}

TEST(Orbit, PeriodTwo)
{
    const double s = 1.0 / std::sqrt(6.0);
    auto o = iterate_orbit(std2, Point2D{s, -s}, 40);
    EXPECT_FALSE(o.escaped);
    for (std::size_t k = 2; k < o.points.size(); ++k)
        EXPECT_LT(oracle::max_diff(o.points[k], o.points[k - 2]), 1e-12);
}

TEST(Orbit, Escape)
{
    auto o = iterate_orbit(std2, Point2D{0.6, -0.6}, 100);
    ASSERT_TRUE(o.escaped);
    ASSERT_TRUE(o.escape_index);
    EXPECT_LE(*o.escape_index, 100);
    EXPECT_EQ(o.points.size(), static_cast<std::size_t>(*o.escape_index) + 1);
    EXPECT_GT(norm(o.points.back()), default_orbit_escape_radius);
    // A larger radius can only delay the escape.
    auto later = iterate_orbit(std2, Point2D{0.6, -0.6}, 100, 1e6);
    ASSERT_TRUE(later.escape_index);
    EXPECT_GE(*later.escape_index, *o.escape_index);
    EXPECT_THROW(iterate_orbit(std2, Point2D{INFINITY, 0.0}, 3), ConfigError);
}

TEST(Orbit, FourDimensional)
{
    const MapParams4D p{-2.5, 1.0, 0.1};
    const Point4D q{0.1, -0.2, 0.05, 0.3};
    auto o = iterate_orbit(p, q, 5);
    ASSERT_EQ(o.points.size(), 6u);
    EXPECT_EQ(o.points[1], image(p, q));
}

TEST(Horseshoe, Levels)
{
    const HorseshoeMap h{};
    EXPECT_EQ(horseshoe_level(h, Point2D{0.0, 0.0}), 3);
    EXPECT_EQ(horseshoe_level(h, Point2D{0.7, 0.0}), 0);
    const Point2D q{0.13, -0.31};
    EXPECT_LT(oracle::max_diff(h.backward(h.forward(q)), q), 1e-14);
    EXPECT_LT(oracle::max_diff(h.forward(h.backward(q)), q), 1e-14);
}

TEST(Horseshoe, StripsAndIntersection)
{
    auto s = horseshoe_strips(5.0, 400);
    EXPECT_EQ(s.square.size(), 400u * 400u);
    EXPECT_LT(s.strips.size(), s.square.size());
    EXPECT_LT(s.intersection.size(), s.strips.size());
    EXPECT_GT(s.intersection.size(), 0u);
    const HorseshoeMap h{};
    for (const auto& q : s.strips)
        EXPECT_TRUE(in_unit_square(h.backward(q)));
    for (const auto& q : s.intersection)
        EXPECT_TRUE(in_unit_square(h.forward(q)));
    EXPECT_THROW(horseshoe_strips(5.0, 1), ConfigError);
}

TEST(Horseshoe, ThreeVerticalStrips)
{
    auto s = horseshoe_strips(5.0, 1000);
    EXPECT_EQ(band_count(s.strips, s.spacing), 3);
    // The intersection splits into three columns too, centred on -1/sqrt30, 0, 1/sqrt30 after rescaling.
    auto cols = projected_bands(s.intersection, s.spacing);
    ASSERT_EQ(cols.size(), 3u);
    EXPECT_LT(cols[0].second, 0.0);
    EXPECT_LT(cols[1].first, 0.0);
    EXPECT_GT(cols[1].second, 0.0);
    EXPECT_GT(cols[2].first, 0.0);
    EXPECT_NEAR(cols[0].first, -cols[2].second, 2.0 * s.spacing);
}

TEST(Horseshoe, RunSplitting)
{
    auto r = runs({0.0, 0.1, 0.2, 0.5, 0.6}, 0.1);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0], std::make_pair(0.0, 0.2));
    EXPECT_EQ(r[1], std::make_pair(0.5, 0.6));
    EXPECT_EQ(band_count({}, 0.1), 0);
}

TEST(Slice, SeedOnTheSliceIsEmitted)
{
    const MapParams4D p{-2.5, 1.0, 0.1};
    SliceOptions opt;
    opt.n_steps = 0;
    auto pts = slice_4d(p, {Point4D{0.1, 0.2, 0.3, opt.y2_star}}, opt);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_EQ(pts[0].source_index, 0);
    EXPECT_EQ(pts[0].x1, 0.1);
    EXPECT_EQ(pts[0].x2, 0.3);
}

TEST(Slice, OriginNeverHits)
{
    SliceOptions opt;
    opt.n_steps = 1000;
    EXPECT_TRUE(slice_4d(MapParams4D{}, {Point4D{}}, opt).empty());
    opt.tolerance = 0.0;
    EXPECT_THROW(slice_4d(MapParams4D{}, {Point4D{}}, opt), ConfigError);
}

TEST(Slice, TighterToleranceKeepsSubset)
{
    const MapParams4D p{-2.5, 1.0, 0.0};
    const double s = 1.0 / std::sqrt(6.0);
    std::vector<Point4D> seeds{{s + 0.02, -s, s, -s + 0.01}, {s, -s + 0.03, s - 0.01, -s}};
    SliceOptions wide;
    wide.n_steps = 20000;
    wide.tolerance = 1e-3;
    SliceOptions narrow = wide;
    narrow.tolerance = 1e-4;
    auto a = slice_4d(p, seeds, wide), b = slice_4d(p, seeds, narrow);
    EXPECT_GT(a.size(), b.size());
    EXPECT_GT(b.size(), 0u);
    for (const auto& q : a) {
        EXPECT_GE(q.seed_index, 0);
        EXPECT_LT(q.seed_index, 2);
    }
    // Orbits near the elliptic cycle stay near it.
    for (const auto& q : b) {
        EXPECT_NEAR(std::abs(q.x1), s, 0.1);
        EXPECT_NEAR(std::abs(q.x2), s, 0.1);
    }
    narrow.threads = 2;
    auto c = slice_4d(p, seeds, narrow);
    ASSERT_EQ(c.size(), b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        EXPECT_EQ(b[i].source_index, c[i].source_index);
}

TEST(ManifoldSampling, CurveInsideCertifiedDomain)
{
    auto s = compute_coeffs_2d(std2, Branch::unstable, 34);
    auto prof = validity_profile_2d(s, 1e-15, 1.0);
    auto c = sample_manifold_grid(s, -prof.tau, prof.tau, 101);
    ASSERT_EQ(c.points.size(), 101u);
    for (double t : c.t)
        EXPECT_LT(defining_error(s, t), 1e-15);
    EXPECT_THROW(sample_manifold_grid(s, 0.0, 1.0, 1), ConfigError);
}

TEST(ManifoldSampling, MeshLayout)
{
    auto s = compute_coeffs_4d(MapParams4D{-2.5, 1.0, 0.1}, Branch::unstable, 30);
    auto m = sample_manifold_grid(s, -1.0, 1.0, -0.5, 0.5, 5, 9);
    EXPECT_EQ(m.nodes.size(), 45u);
    EXPECT_EQ(m.at(2, 4).u, 0.0);
    EXPECT_EQ(m.at(2, 4).v, 0.0);
    EXPECT_EQ(m.at(2, 4).point, Point4D{});
    EXPECT_EQ(m.at(0, 0).v, -0.5);
    EXPECT_EQ(m.at(4, 8).u, 1.0);
}

TEST(ManifoldSampling, UncoupledMeshSymmetricRow)
{
    // At b = 0 the u axis follows the symmetric mode: the row v = 0 lies in
    // the plane x1 = x2, y1 = y2 and repeats the planar manifold.
    auto s = compute_coeffs_4d(MapParams4D{-2.5, 1.0, 0.0}, Branch::unstable, 30);
    auto p2 = compute_coeffs_2d(std2, Branch::unstable, 30);
    auto m = sample_manifold_grid(s, -1.0, 1.0, -1.0, 1.0, 3, 21);
    for (int c = 0; c < m.cols; ++c) {
        const auto& n = m.at(1, c);
        EXPECT_EQ(n.v, 0.0);
        EXPECT_LT(std::abs(n.point[0] - n.point[2]), 1e-15);
        EXPECT_LT(std::abs(n.point[1] - n.point[3]), 1e-15);
        auto q = evaluate(p2, n.u / std::sqrt(2.0));
        EXPECT_LT(std::abs(n.point[0] - q[0]) + std::abs(n.point[1] - q[1]), 1e-13);
    }
    // Along u = v only the first chain moves.
    for (double t : {-0.6, 0.3, 0.7}) {
        auto q = evaluate(s, t, t);
        EXPECT_LT(std::abs(q[2]) + std::abs(q[3]), 1e-14);
    }
}

TEST(ManifoldSampling, IteratedSegment)
{
    auto s = compute_coeffs_2d(std2, Branch::unstable, 100);
    auto polys = iterate_manifold_segment(s, 0.42, 3, 50);
    ASSERT_EQ(polys.size(), 4u);
    // The k-th image of the fundamental segment is the series on the scaled segment.
    for (std::size_t i = 0; i < polys[2].size(); ++i) {
        const double t = 0.42 / s.lambda + (0.42 - 0.42 / s.lambda) * i / 49.0;
        EXPECT_LT(oracle::max_diff(polys[2][i], evaluate(s, s.lambda * s.lambda * t)), 1e-12);
    }
    auto st = iterate_manifold_segment(compute_coeffs_2d(std2, Branch::stable, 100), 0.42, 2, 50);
    EXPECT_EQ(st.size(), 3u);
}
