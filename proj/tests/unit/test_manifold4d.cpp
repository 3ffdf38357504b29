#include <hommap/manifold4d.hpp>
#include <hommap/reference_suite.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hommap;

namespace {

const MapParams4D std4{-2.5, 1.0, 0.1};

oracle::Square to_square(const Series4D& s, int i)
{
    oracle::Square sq(s.order + 1, std::vector<double>(s.order + 1, 0.0));
    for (int n = 0; n <= s.order; ++n)
        for (int m = 0; n + m <= s.order; ++m)
            sq[n][m] = s.coeff(i, n, m);
    return sq;
}

} // namespace

TEST(TriangularLayout, Indexing)
{
    EXPECT_EQ(tri_index(0, 0), 0u);
    EXPECT_EQ(tri_index(1, 0), 1u);
    EXPECT_EQ(tri_index(0, 1), 2u);
    EXPECT_EQ(tri_index(2, 0), 3u);
    EXPECT_EQ(tri_index(0, 2), 5u);
    EXPECT_EQ(tri_size(50), 51u * 52u / 2u);
}

TEST(Series4D, Invariants)
{
    for (auto br : {Branch::unstable, Branch::stable}) {
        auto s = compute_coeffs_4d(std4, br, 21);
        auto spec = eigen_origin(std4);
        const auto& group = br == Branch::unstable ? spec.unstable : spec.stable;
        Vec<4> va{}, vb{};
        for (const auto& e : group)
            (e.mode == Mode::symmetric ? va : vb) = e.vector;
        for (int i = 0; i < 4; ++i) {
            EXPECT_EQ(s.coeff(i, 0, 0), 0.0);
            EXPECT_EQ(s.coeff(i, 1, 0), va[i]);
            EXPECT_EQ(s.coeff(i, 0, 1), vb[i]);
        }
        for (int n = 0; n <= 21; ++n)
            for (int m = 0; n + m <= 21; ++m) {
                const double L = std::pow(s.lambdas[0], n) * std::pow(s.lambdas[1], m);
                const double tol = 1e-13 * std::abs(s.coeff(1, n, m)) + 1e-300;
                EXPECT_NEAR(s.coeff(1, n, m), L * s.coeff(0, n, m), tol);
                EXPECT_NEAR(s.coeff(3, n, m), L * s.coeff(2, n, m), 1e-13 * std::abs(s.coeff(3, n, m)) + 1e-300);
                if ((n + m) % 2 == 0) {
                    for (int i = 0; i < 4; ++i)
                        EXPECT_EQ(s.coeff(i, n, m), 0.0);
                }
            }
    }
}

TEST(Series4D, DegreeTraversalIsIrrelevant)
{
    auto a = compute_coeffs_4d(std4, Branch::unstable, 30, DegreeTraversal::ascending_n);
    auto b = compute_coeffs_4d(std4, Branch::unstable, 30, DegreeTraversal::descending_n);
    for (int i = 0; i < 4; ++i)
        EXPECT_EQ(a.coeffs[i], b.coeffs[i]);
}

TEST(Series4D, UncoupledProductStructure)
{
    // Mode coordinates: chain one follows (u + v)/sqrt2, chain two (u - v)/sqrt2.
    const MapParams4D p{-2.5, 1.0, 0.0};
    for (auto br : {Branch::unstable, Branch::stable}) {
        auto s4 = compute_coeffs_4d(p, br, 40);
        auto s2 = compute_coeffs_2d(MapParams2D{-2.5, 1.0}, br, 40);
        EXPECT_EQ(s4.lambdas[0], s2.lambda);
        EXPECT_EQ(s4.lambdas[1], s2.lambda);
        for (const auto& uv : oracle::uniform_points<2>(40, -0.8, 0.8, 11)) {
            auto q = evaluate(s4, uv[0], uv[1]);
            auto c1 = evaluate(s2, (uv[0] + uv[1]) / std::sqrt(2.0));
            auto c2 = evaluate(s2, (uv[0] - uv[1]) / std::sqrt(2.0));
            EXPECT_LT(oracle::max_diff(q, Point4D{c1[0], c1[1], c2[0], c2[1]}), 1e-13);
        }
    }
}

TEST(Series4D, SmallCouplingIsContinuous)
{
    auto a = compute_coeffs_4d(MapParams4D{-2.5, 1.0, 0.0}, Branch::unstable, 25);
    auto b = compute_coeffs_4d(MapParams4D{-2.5, 1.0, 1e-8}, Branch::unstable, 25);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < a.coeffs[i].size(); ++k)
            worst = std::max(worst, std::abs(a.coeffs[i][k] - b.coeffs[i][k]));
    EXPECT_GT(worst, 0.0);
    EXPECT_LT(worst, 1e-6);
}

TEST(Series4D, ChainSwapSymmetry)
{
    // Swapping the chains fixes the symmetric mode and negates the
    // antisymmetric one, so P(u, v) maps to P(u, -v).
    auto s = compute_coeffs_4d(std4, Branch::unstable, 30);
    for (const auto& uv : oracle::uniform_points<2>(30, -0.9, 0.9, 12)) {
        auto q = evaluate(s, uv[0], uv[1]);
        auto r = evaluate(s, uv[0], -uv[1]);
        EXPECT_LT(oracle::max_diff(Point4D{q[2], q[3], q[0], q[1]}, r), 1e-14);
    }
}

TEST(Series4D, NaiveCubeRecomposition)
{
    // Coefficients of f(P) - P(lA u, lB v) with an O(N^6) cube.
    const int N = 13;
    auto s = compute_coeffs_4d(std4, Branch::unstable, N);
    auto y1 = to_square(s, 1), y2 = to_square(s, 3);
    auto x1 = to_square(s, 0), x2 = to_square(s, 2);
    auto c1 = oracle::naive_cube(y1, N), c2 = oracle::naive_cube(y2, N);
    const double c = std4.c, d = std4.delta, b = std4.b;
    for (int n = 0; n <= N; ++n)
        for (int m = 0; n + m <= N; ++m) {
            const double L = std::pow(s.lambdas[0], n) * std::pow(s.lambdas[1], m);
            const double r1 = y1[n][m] - L * x1[n][m];
            const double r2 = c * y1[n][m] - d * x1[n][m] + 3.0 * c1[n][m] + b * (y1[n][m] - y2[n][m]) - L * y1[n][m];
            const double r3 = y2[n][m] - L * x2[n][m];
            const double r4 = c * y2[n][m] - d * x2[n][m] + 3.0 * c2[n][m] - b * (y1[n][m] - y2[n][m]) - L * y2[n][m];
            const double scale = 1.0 + std::abs(L * y1[n][m]) + std::abs(L * y2[n][m]);
            for (double r : {r1, r2, r3, r4})
                EXPECT_LT(std::abs(r), 1e-13 * scale) << n << "," << m;
        }
}

TEST(Series4D, Evaluation)
{
    auto s = compute_coeffs_4d(std4, Branch::stable, 50);
    EXPECT_EQ(evaluate(s, 0.0, 0.0), Point4D{});
    for (const auto& uv : oracle::uniform_points<2>(30, -1.0, 1.0, 13))
        EXPECT_LT(oracle::max_diff(evaluate(s, uv[0], uv[1]), -evaluate(s, -uv[0], -uv[1])), 1e-13);
}

TEST(Series4D, ParameterJacobian)
{
    auto s = compute_coeffs_4d(std4, Branch::unstable, 50);
    auto j0 = parameter_jacobian(s, 0.0, 0.0);
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(j0[i][0], s.coeff(i, 1, 0));
        EXPECT_EQ(j0[i][1], s.coeff(i, 0, 1));
    }
    std::function<Vec<4>(const Vec<2>&)> f = [&](const Vec<2>& a) { return evaluate(s, a); };
    const Vec<2> at{0.3, 0.2};
    EXPECT_LT(oracle::max_diff(parameter_jacobian(s, at), oracle::fd_jacobian<4, 2>(f, at)), 1e-7);
    EXPECT_LT(oracle::max_diff(parameter_jacobian(s, 0.4, -0.7), parameter_jacobian(s, -0.4, 0.7)), 1e-13);
}

TEST(Series4D, ValidityProfile)
{
    auto s50 = compute_coeffs_4d(std4, Branch::unstable, 50);
    auto prof = validity_profile_4d(s50, reference::epsilon_4d_validity);
    EXPECT_EQ(prof.thetas.size(), 17u);
    EXPECT_GE(prof.r_valid, 1.0);
    for (const auto& ray : prof.rays) {
        EXPECT_EQ(ray.front().first, 0.0);
        EXPECT_EQ(ray.front().second, 0.0);
    }

    const MapParams4D p0{-2.5, 1.0, 0.0};
    auto r34 = validity_profile_4d(compute_coeffs_4d(p0, Branch::unstable, 34), 1e-15).r_valid;
    auto r50 = validity_profile_4d(compute_coeffs_4d(p0, Branch::unstable, 50), 1e-15).r_valid;
    EXPECT_LT(r34, r50);
    EXPECT_THROW(validity_profile_4d(s50, -1.0), ConfigError);
}

TEST(Series4D, Resonance)
{
    // lB^3 = lA for the unstable pair when lB = -2^(1/3).
    const double lb = -std::cbrt(2.0);
    const double b = (lb + 1.0 / lb + 2.5) / 2.0;
    try {
        compute_coeffs_4d(MapParams4D{-2.5, 1.0, b}, Branch::unstable, 5);
        FAIL() << "expected a resonance";
    } catch (const ResonanceError& e) {
        EXPECT_EQ(e.n(), 0);
        EXPECT_EQ(e.m(), 3);
    }
    EXPECT_NO_THROW(compute_coeffs_4d(MapParams4D{-2.5, 1.0, b}, Branch::unstable, 2));
}
