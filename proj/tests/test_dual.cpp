#include "finsler/dual.hpp"

#include <gtest/gtest.h>

#include <cmath>

using finsler::Dual;
using finsler::pow_int;
using finsler::scalar_value;

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

TEST(Dual, ArithmeticRules) {
    D1 x(1.7, 1.0);
    D1 p = x * x * x - 2.0 * x + 5.0;
    EXPECT_DOUBLE_EQ(p.a, 1.7 * 1.7 * 1.7 - 2.0 * 1.7 + 5.0);
    EXPECT_DOUBLE_EQ(p.b, 3.0 * 1.7 * 1.7 - 2.0);

    D1 q = (x + 1.0) / (x - 0.5);
    double der = ((1.7 - 0.5) - (1.7 + 1.0)) / ((1.7 - 0.5) * (1.7 - 0.5));
    EXPECT_NEAR(q.b, der, 1e-15);
}

TEST(Dual, ElementaryFunctions) {
    double v = 0.83;
    D1 x(v, 1.0);
    EXPECT_NEAR(sin(x).b, std::cos(v), 1e-15);
    EXPECT_NEAR(cos(x).b, -std::sin(v), 1e-15);
    EXPECT_NEAR(exp(x).b, std::exp(v), 1e-15);
    EXPECT_NEAR(log(x).b, 1.0 / v, 1e-15);
    EXPECT_NEAR(sqrt(x).b, 0.5 / std::sqrt(v), 1e-15);
    EXPECT_NEAR(pow(x, 2.5).b, 2.5 * std::pow(v, 1.5), 1e-14);
}

TEST(Dual, SecondDerivative) {
    // f(u) = exp(u) sin(u); f'' = 2 exp(u) cos(u)
    double v = 0.4;
    D2 u(D1(v, 1.0), D1(1.0, 0.0));
    D2 f = exp(u) * sin(u);
    EXPECT_NEAR(f.b.b, 2.0 * std::exp(v) * std::cos(v), 1e-13);
}

TEST(Dual, MixedPartialSymmetry) {
    // f(u, w) = u^2 w + sin(u w); d2f/dudw at (0.7, -0.3)
    double uv = 0.7, wv = -0.3;
    auto f = [](auto u, auto w) { return u * u * w + sin(u * w); };
    D2 u(D1(uv, 1.0), D1(0.0, 0.0));
    D2 w(D1(wv, 0.0), D1(1.0, 0.0));
    double mixed = f(u, w).b.b;
    double expected = 2.0 * uv + std::cos(uv * wv) - uv * wv * std::sin(uv * wv);
    EXPECT_NEAR(mixed, expected, 1e-13);

    // swap the seeding
    D2 u2(D1(uv, 0.0), D1(1.0, 0.0));
    D2 w2(D1(wv, 1.0), D1(0.0, 0.0));
    EXPECT_NEAR(f(u2, w2).b.b, mixed, 1e-15);
}

TEST(Dual, ThirdDerivative) {
    // f(u) = u^5: f''' = 60 u^2
    double v = 1.3;
    D3 u(D2(D1(v, 1.0), D1(1.0, 0.0)), D2(D1(1.0, 0.0), D1(0.0, 0.0)));
    D3 f = u * u * u * u * u;
    EXPECT_NEAR(f.b.b.b, 60.0 * v * v, 1e-11);
}

TEST(Dual, PowInt) {
    EXPECT_DOUBLE_EQ(pow_int(2.0, 10), 1024.0);
    EXPECT_DOUBLE_EQ(pow_int(2.0, 0), 1.0);
    EXPECT_DOUBLE_EQ(pow_int(2.0, -2), 0.25);

    D1 x(3.0, 1.0);
    D1 r = pow_int(x, 4);
    EXPECT_DOUBLE_EQ(r.a, 81.0);
    EXPECT_DOUBLE_EQ(r.b, 4.0 * 27.0);
    D1 rn = pow_int(x, -1);
    EXPECT_NEAR(rn.b, -1.0 / 9.0, 1e-15);
}

TEST(Dual, ScalarValueThroughNesting) {
    D3 u(D2(D1(2.5, 1.0), D1(1.0, 0.0)), D2(D1(1.0, 0.0), D1(0.0, 0.0)));
    EXPECT_DOUBLE_EQ(scalar_value(u), 2.5);
    EXPECT_DOUBLE_EQ(scalar_value(3.25), 3.25);
}
