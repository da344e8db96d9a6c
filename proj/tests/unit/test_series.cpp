#include <doctest.h>

#include <random>

#include "soliton/error.hpp"
#include "soliton/series.hpp"

using namespace soliton;

namespace {

PadicField Q11()
{
    static PadicField K = make_qp(11, 24);
    return K;
}

LaurentSeries poly(const std::vector<std::pair<int, long long>>& terms)
{
    LaurentSeries s = LaurentSeries::zero(Q11(), 0, true);
    for (auto [n, c] : terms) s.set(n, s.coeff(n) + PadicElement::from_int(Q11(), c));
    return s;
}

LaurentSeries random_series(std::mt19937_64& rng, int lo, int hi, bool unit_lead)
{
    auto K = Q11();
    LaurentSeries s(K, lo, hi, true);
    for (int n = lo; n <= hi; ++n) {
        long long c = static_cast<long long>(rng() % 2000) - 1000;
        if (rng() % 3 == 0) c *= 11;
        s.set(n, PadicElement::from_int(K, c));
    }
    if (unit_lead) s.set(hi, PadicElement::from_int(K, 1 + rng() % 10));
    return s;
}

} // namespace

TEST_CASE("series arithmetic examples")
{
    auto a = poly({{1, 1}, {0, 1}}), b = poly({{1, 1}, {0, -1}});
    auto c = a * b;
    CHECK(c.deg() == 2);
    CHECK(c.coeff(2).equals(PadicElement::one(Q11())));
    CHECK(c.coeff(1).is_zero());
    CHECK(c.coeff(0).equals(PadicElement::from_int(Q11(), -1)));

    // T^d (1 + c T^{-1}) with |c| <= 1.
    auto m = LaurentSeries::monomial(PadicElement::one(Q11()), 5, 0) * poly({{0, 1}, {-1, 11}});
    auto dn = m.degree_norm();
    CHECK(dn.deg == 5);
    CHECK(*dn.norm_val == Rational(0));
}

TEST_CASE("degree_norm and reduction examples")
{
    auto s = poly({{3, 11}, {1, 1}});
    auto dn = s.degree_norm();
    CHECK(dn.deg == 3);
    CHECK(*dn.norm_val == Rational(0));
    CHECK(poly({{1, 1}, {2, 11}}).reduce_mod_p().deg() == 1);
    CHECK(!LaurentSeries::zero(Q11(), 0, true).degree_norm().deg);

    auto r = poly({{2, 1}, {1, 11}, {0, 3}}).reduce_mod_p();
    CHECK(r.deg() == 2);
    CHECK(r.coeff(1)[0] == 0);
    CHECK(r.coeff(0)[0] == 3);
    auto bad = LaurentSeries::monomial(PadicElement::from_mpq(Q11(), mpq_class(1, 11)), 1, 0);
    CHECK_THROWS_WITH_AS(bad.reduce_mod_p(), doctest::Contains("NotIntegral"), Error);
}

TEST_CASE("truncated products keep only guaranteed coefficients")
{
    auto K = Q11();
    LaurentSeries a(K, -5, 3, false), b(K, -4, 2, false);
    for (int n = -5; n <= 3; ++n) a.set(n, PadicElement::from_int(K, n + 7));
    for (int n = -4; n <= 2; ++n) b.set(n, PadicElement::from_int(K, 2 * n - 1));
    auto c = a * b;
    CHECK(c.floor() == std::max(-5 + 2, -4 + 3));
    CHECK(c.top() == 5);
    for (int n = c.floor(); n <= c.top(); ++n) {
        long long s = 0;
        for (int i = -5; i <= 3; ++i)
            if (n - i >= -4 && n - i <= 2) s += (i + 7) * (2 * (n - i) - 1);
        CHECK(c.coeff(n).equals(PadicElement::from_int(K, s)));
    }
    CHECK_THROWS_AS(c.coeff(c.floor() - 1), Error);
}

TEST_CASE("window product matches direct convolution")
{
    auto K = Q11();
    std::mt19937_64 rng(5);
    WindowSeries a(K, -10, 10, false, true), b(K, -10, 10, true, true);
    std::vector<long long> av(21), bv(21);
    for (int n = -10; n <= 10; ++n) {
        av[n + 10] = static_cast<long long>(rng() % 100) - 50;
        bv[n + 10] = static_cast<long long>(rng() % 100) - 50;
        a.set(n, PadicElement::from_int(K, av[n + 10]));
        b.set(n, PadicElement::from_int(K, bv[n + 10]));
    }
    auto c = a * b;
    CHECK(c.guaranteed_lo() == 0);
    CHECK(c.guaranteed_hi() == 20);
    long long s0 = 0;
    for (int i = -10; i <= 10; ++i) s0 += av[i + 10] * bv[-i + 10];
    CHECK(c.coeff(0).equals(PadicElement::from_int(K, s0)));
    CHECK(*c.norm_bound() >= *a.norm_bound() + *b.norm_bound());

    WindowSeries u(K, -10, 10), v(K, -10, 10);
    auto w = u * v;
    CHECK(w.guaranteed_lo() > w.guaranteed_hi());
}

TEST_CASE("norm, degree and reduction properties on random samples")
{
    std::mt19937_64 rng(17);
    for (int t = 0; t < 60; ++t) {
        auto a = random_series(rng, -6, 4, true), b = random_series(rng, -5, 3, t % 2 == 0), c = random_series(rng, -4, 2, false);
        auto ab = a * b;
        auto na = a.degree_norm(), nb = b.degree_norm(), nab = ab.degree_norm();
        CHECK(*nab.norm_val >= *na.norm_val + *nb.norm_val);
        if (a.coeff(*a.deg()).is_unit() && b.deg() && b.coeff(*b.deg()).is_unit()) CHECK(*ab.deg() == *a.deg() + *b.deg());
        // Unique maximal coefficient in a makes the norm multiplicative.
        LaurentSeries u = LaurentSeries::zero(Q11(), 0, true);
        u.set(0, PadicElement::one(Q11()));
        u.set(-1, PadicElement::from_int(Q11(), 11 * (1 + rng() % 5)));
        CHECK(*(u * b).degree_norm().norm_val == *nb.norm_val);

        auto ra = a.reduce_mod_p(), rb = b.reduce_mod_p(), rc = c.reduce_mod_p();
        auto rab = (a * b).reduce_mod_p(), rapc = (a + c).reduce_mod_p();
        const auto& F = ra.F;
        for (int n = -11; n <= 7; ++n) {
            ResidueField::Elt s = F.zero();
            for (int i = -6; i <= 4; ++i) s = F.add(s, F.mul(ra.coeff(i), rb.coeff(n - i)));
            CHECK(rab.coeff(n) == s);
        }
        for (int n = -6; n <= 4; ++n) CHECK(rapc.coeff(n) == F.add(ra.coeff(n), rc.coeff(n)));
    }
}
