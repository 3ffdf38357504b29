#include <hommap/exact.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace hommap;
using exact::QuadraticSurd;
using exact::Rat;

namespace {

using Q129 = QuadraticSurd<129>;

} // namespace

TEST(ExactArithmetic, Surd)
{
    Q129 x{exact::Rational(-23, 20), exact::Rational(1, 20)};
    // x is a root of lambda^2 + 2.3 lambda + 1.
    auto r = x * x + Q129(exact::Rational(23, 10)) * x + Q129(1);
    EXPECT_TRUE(exact::is_zero(r));
    EXPECT_NEAR(x.to_double(), (-2.3 + std::sqrt(2.3 * 2.3 - 4.0)) / 2.0, 1e-15);
    EXPECT_EQ(x / x, Q129(1));
    EXPECT_NEAR(pivot_magnitude(x - Q129(exact::Rational(-23, 20), exact::Rational(1, 20))), 0.0, 0.0);
    EXPECT_NEAR(pivot_magnitude(x), std::abs(x.to_double()), 1e-15);
}

TEST(ExactArithmetic, TruncatedProduct)
{
    std::vector<Rat> a{Rat(0), Rat(1), Rat(2)}, b{Rat(1), Rat(1)};
    auto p = exact::mul(a, b, 2);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p[0], Rat(0));
    EXPECT_EQ(p[1], Rat(1));
    EXPECT_EQ(p[2], Rat(3));
}

TEST(ExactPlanar, DefectVanishes)
{
    // c = -5/2, delta = 1, lambda = -2 and the unnormalized eigenvector (1, -2).
    const int N = 9;
    auto co = solve_planar_coefficients<Rat>(Rat(-5, 2), Rat(1), Rat(-2), Rat(1), Rat(-2), N);
    EXPECT_EQ(co.a[3], Rat(-8, 15));
    EXPECT_EQ(co.b[3], Rat(64, 15));
    auto d = exact::planar_defect(Rat(-5, 2), Rat(1), Rat(-2), co.a, co.b, N);
    EXPECT_TRUE(exact::all_zero(d));

    // A corrupted coefficient shows up at its own order.
    auto bad = co.b;
    bad[5] = bad[5] + Rat(1, 1000);
    auto e = exact::planar_defect(Rat(-5, 2), Rat(1), Rat(-2), co.a, bad, N);
    EXPECT_FALSE(exact::is_zero(e[0][5]));
    for (int n = 0; n < 5; ++n)
        EXPECT_TRUE(exact::is_zero(e[0][n]) && exact::is_zero(e[1][n]));
}

TEST(ExactPlanar, MatchesDoubleRecurrence)
{
    const int N = 25;
    auto co = solve_planar_coefficients<Rat>(Rat(-5, 2), Rat(1), Rat(-2), Rat(1), Rat(-2), N);
    // Unnormalized eigenvector (1, -2) is sqrt5 times the unit one.
    auto s = compute_coeffs_2d(MapParams2D{-2.5, 1.0}, Branch::unstable, N, std::sqrt(5.0));
    for (int n = 1; n <= N; ++n) {
        const double ref = co.a[n].to_double();
        EXPECT_NEAR(s.coeffs_a[n], ref, 1e-13 * std::abs(ref)) << n;
    }
}

TEST(ExactCoupled, DefectVanishes)
{
    // b = 1/10: lA = -2, lB = (-23 - sqrt129)/20, vectors (1, l, +-1, +-l).
    const int N = 5;
    const Q129 c(exact::Rational(-5, 2)), delta(1), b(exact::Rational(1, 10));
    const Q129 la(-2);
    const Q129 lb(exact::Rational(-23, 20), exact::Rational(-1, 20));
    Vec<4, Q129> va{Q129(1), la, Q129(1), la};
    Vec<4, Q129> vb{Q129(1), lb, Q129(-1), -lb};
    auto co = solve_coupled_coefficients<Q129>(c, delta, b, la, lb, va, vb, N);
    auto d = exact::coupled_defect(c, delta, b, la, lb, co.grids, N);
    EXPECT_TRUE(exact::all_zero(d));

    auto bad = co.grids;
    bad[1][tri_index(2, 1)] = bad[1][tri_index(2, 1)] + Q129(1);
    EXPECT_FALSE(exact::all_zero(exact::coupled_defect(c, delta, b, la, lb, bad, N)));
}

TEST(ExactCoupled, MatchesDoubleRecurrence)
{
    const int N = 7;
    const Q129 c(exact::Rational(-5, 2)), delta(1), b(exact::Rational(1, 10));
    const Q129 la(-2);
    const Q129 lb(exact::Rational(-23, 20), exact::Rational(-1, 20));
    Vec<4, Q129> va{Q129(1), la, Q129(1), la};
    Vec<4, Q129> vb{Q129(1), lb, Q129(-1), -lb};
    auto co = solve_coupled_coefficients<Q129>(c, delta, b, la, lb, va, vb, N);
    auto lbd = lb.to_double();
    auto num = solve_coupled_coefficients<double>(-2.5, 1.0, 0.1, -2.0, lbd, Vec<4>{1.0, -2.0, 1.0, -2.0},
                                                  Vec<4>{1.0, lbd, -1.0, -lbd}, N);
    for (int i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < co.grids[i].size(); ++k) {
            const double ref = co.grids[i][k].to_double();
            EXPECT_NEAR(num.grids[i][k], ref, 1e-12 * std::abs(ref) + 1e-15) << i << "," << k;
        }
}
