#include "soliton/curve.hpp"

#include <algorithm>
#include <numeric>

#include "soliton/error.hpp"

namespace soliton {

namespace {

using PS = std::vector<PadicElement>; // power series in u = T^{-1}

long long floor_div(long long a, long long b)
{
    long long q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

long long ceil_div(long long a, long long b)
{
    return -floor_div(-a, b);
}

bool exact_zero(const PadicElement& a)
{
    return a.is_zero() && a.prec() == PadicElement::kInf;
}

PS ps_const(const PadicField& K, const PadicElement& c, int n)
{
    PS r(n, PadicElement(K));
    if (n > 0) r[0] = c;
    return r;
}

PS ps_mul(const PS& a, const PS& b, int n)
{
    const PadicField& K = a.front().field();
    PS r(n, PadicElement(K));
    int na = std::min<int>(n, a.size()), nb = static_cast<int>(b.size());
    for (int i = 0; i < na; ++i) {
        if (exact_zero(a[i])) continue;
        int lim = std::min(nb, n - i);
        for (int j = 0; j < lim; ++j)
            if (!exact_zero(b[j])) r[i + j] += a[i] * b[j];
    }
    return r;
}

PS ps_inv(const PS& a, int n)
{
    const PadicField& K = a.front().field();
    PS b(n, PadicElement(K));
    PadicElement a0i = a[0].inv();
    b[0] = a0i;
    for (int k = 1; k < n; ++k) {
        PadicElement s(K);
        for (int i = 1; i <= k && i < static_cast<int>(a.size()); ++i)
            if (!exact_zero(a[i])) s += a[i] * b[k - i];
        b[k] = -(s * a0i);
    }
    return b;
}

PS ps_pow(PS a, long long e, int n)
{
    PadicField K = a.front().field();
    if (e < 0) {
        a = ps_inv(a, n);
        e = -e;
    }
    PS r = ps_const(K, PadicElement::one(K), n);
    while (e > 0) {
        if (e & 1) r = ps_mul(r, a, n);
        e >>= 1;
        if (e) a = ps_mul(a, a, n);
    }
    return r;
}

PS ps_sub(const PS& a, const PS& b)
{
    PS r = a;
    for (size_t i = 0; i < b.size() && i < r.size(); ++i) r[i] -= b[i];
    return r;
}

// u^k * a, truncated to n terms.
PS ps_shift(const PS& a, int k, int n)
{
    const PadicField& K = a.front().field();
    PS r(n, PadicElement(K));
    for (int i = 0; i + k < n && i < static_cast<int>(a.size()); ++i) r[i + k] = a[i];
    return r;
}

// Integer polynomial (ascending) evaluated at a series without constant term.
PS ps_poly(const std::vector<mpz_class>& poly, const PS& w, int n)
{
    const PadicField& K = w.front().field();
    PS r = ps_const(K, PadicElement::from_mpz(K, poly.back()), n);
    for (size_t i = poly.size() - 1; i-- > 0;) {
        r = ps_mul(r, w, n);
        r[0] += PadicElement::from_mpz(K, poly[i]);
    }
    return r;
}

LaurentSeries to_laurent(const PadicField& K, int top, const PS& a, int len)
{
    std::vector<PadicElement> c(len, PadicElement(K));
    for (int i = 0; i < len && i < static_cast<int>(a.size()); ++i) c[len - 1 - i] = a[i];
    return LaurentSeries::from_coeffs(K, top - len + 1, std::move(c));
}

std::vector<mpz_class> zpoly_mul(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b)
{
    std::vector<mpz_class> r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

std::vector<mpz_class> zpoly_pow(const std::vector<mpz_class>& a, int e)
{
    std::vector<mpz_class> r{1};
    for (int i = 0; i < e; ++i) r = zpoly_mul(r, a);
    return r;
}

std::vector<mpz_class> reversed(const std::vector<mpz_class>& f)
{
    return std::vector<mpz_class>(f.rbegin(), f.rend());
}

u64 mod_p(const mpz_class& x, u64 p)
{
    mpz_class r = x % mpz_class(static_cast<unsigned long>(p));
    if (r < 0) r += static_cast<unsigned long>(p);
    return r.get_ui();
}

fp::Poly fp_mul(const fp::Poly& a, const fp::Poly& b, u64 p, size_t limit = SIZE_MAX)
{
    if (a.empty() || b.empty()) return {};
    size_t n = std::min(limit, a.size() + b.size() - 1);
    std::vector<u128> acc(n, 0);
    fp::Poly r(n, 0);
    for (size_t i = 0; i < a.size() && i < n; ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size() && i + j < n; ++j)
            if (b[j]) r[i + j] = static_cast<u64>((r[i + j] + static_cast<u128>(a[i]) * b[j]) % p);
    }
    return r;
}

// Data of the expansion at infinity: w = 1/x and the reversed branch factors at w.
struct InfData {
    int L = 0;
    PS w, Xt, Yt, dX;
    std::vector<PS> F;
};

InfData infinity_data(const CurveModel& C, int L)
{
    const PadicField& K = C.K;
    L = std::max(L, 2 * C.d + 2);
    std::vector<mpz_class> G{1};
    for (const auto& b : C.branch) G = zpoly_mul(G, zpoly_pow(reversed(b.poly), b.mult));
    std::vector<mpz_class> P = zpoly_pow(G, C.alpha), dP;
    for (size_t i = 1; i < P.size(); ++i) dP.push_back(P[i] * static_cast<unsigned long>(i));
    if (dP.empty()) dP.push_back(0);

    InfData D;
    D.L = L;
    PS w(L, PadicElement(K));
    w[C.d] = PadicElement::one(K);
    // Newton iteration for w = u^d P(w).
    for (int it = 0; it < 80; ++it) {
        PS phi = ps_sub(w, ps_shift(ps_poly(P, w, L), C.d, L));
        bool done = std::all_of(phi.begin(), phi.end(), [](const PadicElement& c) { return c.is_zero(); });
        if (done) break;
        PS dphi = ps_sub(ps_const(K, PadicElement::one(K), L), ps_shift(ps_poly(dP, w, L), C.d, L));
        w = ps_sub(w, ps_mul(phi, ps_inv(dphi, L), L));
        if (it == 79) throw Error("NoConvergence", "expansion at infinity did not converge");
    }
    D.w = w;
    PS Gw = ps_const(K, PadicElement::one(K), L);
    for (const auto& b : C.branch) {
        D.F.push_back(ps_poly(reversed(b.poly), w, L));
        Gw = ps_mul(Gw, ps_pow(D.F.back(), b.mult, L), L);
    }
    PS Ginv = ps_inv(Gw, L);
    D.Xt = ps_pow(Ginv, C.alpha, L);
    D.Yt = ps_pow(Ginv, C.beta, L);
    D.dX = D.Xt;
    for (int k = 0; k < L; ++k) D.dX[k] = D.Xt[k].mul_int(C.d - k);
    return D;
}

// Y(t) with Y^2 = F(x0 + t), Y(0) = y0.
PS affine_branch(const CurveModel& C, int L)
{
    const PadicField& K = C.K;
    auto F = branch_product(C);
    const PadicElement& x0 = C.base->x0;
    PS Fs(L, PadicElement(K));
    for (size_t m = 0; m < F.size(); ++m) {
        PadicElement xp = PadicElement::one(K);
        for (long n = static_cast<long>(m); n >= 0; --n) {
            if (n < L) {
                mpz_class bin;
                mpz_bin_uiui(bin.get_mpz_t(), m, n);
                Fs[n] += xp.mul_int(F[m] * bin);
            }
            xp = xp * x0;
        }
    }
    PS Y(L, PadicElement(K));
    Y[0] = C.base->y0;
    PadicElement inv2y = (C.base->y0.mul_int(2)).inv();
    for (int n = 1; n < L; ++n) {
        PadicElement s = Fs[n];
        for (int k = 1; k < n; ++k) s -= Y[k] * Y[n - k];
        Y[n] = s * inv2y;
    }
    return Y;
}

struct Diff {
    int i = 0, j = 0;
    std::vector<int> c;
    int o = 0; // order at the base point
};

std::vector<Diff> differentials(const CurveModel& C)
{
    std::vector<Diff> out;
    if (C.base) {
        for (int i = 0; i < C.genus; ++i) out.push_back({i, 1, {}, 0});
        return out;
    }
    for (int j = 1; j < C.d; ++j) {
        std::vector<int> c;
        long long Dj = static_cast<long long>(j) * C.S;
        for (const auto& b : C.branch) {
            c.push_back(static_cast<int>(floor_div(static_cast<long long>(j) * b.mult, C.d)));
            Dj -= static_cast<long long>(C.d) * b.degree() * c.back();
        }
        for (int i = 0; Dj - C.d * (i + 1) - 1 >= 0; ++i) out.push_back({i, j, c, static_cast<int>(Dj - C.d * (i + 1) - 1)});
    }
    std::sort(out.begin(), out.end(), [](const Diff& a, const Diff& b) { return a.o < b.o; });
    if (static_cast<int>(out.size()) != C.genus) throw Error("GenusMismatch", "differential count differs from the genus");
    return out;
}

// Coefficients of prod_k F_k(z)^{gamma_k} through degree N, exact over Q.
std::vector<mpq_class> rational_power_product(const CurveModel& C, const std::vector<mpq_class>& gamma, long long N)
{
    std::vector<mpq_class> acc(N + 1, 0);
    acc[0] = 1;
    for (size_t k = 0; k < C.branch.size(); ++k) {
        auto F = reversed(C.branch[k].poly);
        std::vector<mpq_class> a(N + 1, 0);
        a[0] = 1;
        for (long long n = 1; n <= N; ++n) {
            mpq_class s = 0;
            for (long long i = 1; i <= n && i < static_cast<long long>(F.size()); ++i) {
                if (F[i] == 0) continue;
                s += mpq_class(F[i]) * (gamma[k] * static_cast<long>(i) - static_cast<long>(n - i)) * a[n - i];
            }
            a[n] = s / static_cast<long>(n);
        }
        std::vector<mpq_class> r(N + 1, 0);
        for (long long i = 0; i <= N; ++i) {
            if (acc[i] == 0) continue;
            for (long long j = 0; i + j <= N; ++j)
                if (a[j] != 0) r[i + j] += acc[i] * a[j];
        }
        acc = std::move(r);
    }
    return acc;
}

// Exponents of the reversed branch factors in eta * T^n at infinity.
std::vector<mpq_class> residue_exponents(const CurveModel& C, const Diff& df, long long n)
{
    std::vector<mpq_class> g;
    long long m = C.alpha * n - df.j;
    for (size_t k = 0; k < C.branch.size(); ++k) g.push_back(mpq_class(df.c[k]) + mpq_class(static_cast<long>(m * C.branch[k].mult), C.d));
    return g;
}

mpq_class residue_coefficient(const CurveModel& C, const Diff& df, long long n)
{
    long long e = n - df.o - 1;
    if (e < 0 || e % C.d != 0) return 0;
    long long N = e / C.d;
    auto acc = rational_power_product(C, residue_exponents(C, df, n), N);
    return -mpq_class(C.d) * acc[N];
}

u64 residue_coefficient_mod_p(const CurveModel& C, const Diff& df, long long n)
{
    const u64 p = C.K->p;
    long long e = n - df.o - 1;
    if (e < 0 || e % C.d != 0) return 0;
    long long N = e / C.d;
    mpz_class P = static_cast<unsigned long>(p);
    int T = 1;
    mpz_class pT = P;
    while (pT <= static_cast<long>(N)) {
        pT *= P;
        ++T;
    }
    fp::Poly acc{1};
    long long m = C.alpha * n - df.j;
    mpz_class dinv;
    mpz_class dd = C.d;
    mpz_invert(dinv.get_mpz_t(), dd.get_mpz_t(), pT.get_mpz_t());
    for (size_t k = 0; k < C.branch.size(); ++k) {
        mpz_class num = mpz_class(static_cast<long>(df.c[k])) * C.d + mpz_class(static_cast<long>(m)) * C.branch[k].mult;
        mpz_class g = (num * dinv) % pT;
        if (g < 0) g += pT;
        fp::Poly F;
        for (const auto& c : reversed(C.branch[k].poly)) F.push_back(mod_p(c, p));
        mpz_class stride = 1;
        for (int t = 0; t < T; ++t) {
            u64 digit = mpz_class(g % P).get_ui();
            g /= P;
            if (digit) {
                fp::Poly Q{1};
                for (u64 r = 0; r < digit; ++r) Q = fp_mul(Q, F, p, static_cast<size_t>(N + 1));
                long long s = stride.get_si();
                fp::Poly spread(std::min<long long>(N + 1, (static_cast<long long>(Q.size()) - 1) * s + 1), 0);
                for (size_t i = 0; i < Q.size() && static_cast<long long>(i) * s <= N; ++i) spread[i * s] = Q[i];
                acc = fp_mul(acc, spread, p, static_cast<size_t>(N + 1));
            }
            stride *= P;
        }
    }
    u64 coef = N < static_cast<long long>(acc.size()) ? acc[N] : 0;
    u64 dm = static_cast<u64>(C.d) % p;
    return static_cast<u64>((p - static_cast<u128>(dm) * coef % p) % p);
}

std::vector<std::vector<u64>> inverse_mod(std::vector<std::vector<u64>> a, u64 p)
{
    int n = static_cast<int>(a.size());
    std::vector<std::vector<u64>> inv(n, std::vector<u64>(n, 0));
    for (int i = 0; i < n; ++i) inv[i][i] = 1;
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (a[r][c]) { piv = r; break; }
        if (piv < 0) throw Error("NotNormalizable", "normalization block singular mod p");
        std::swap(a[c], a[piv]);
        std::swap(inv[c], inv[piv]);
        u64 iv = fp::inv(a[c][c], p);
        for (int k = 0; k < n; ++k) {
            a[c][k] = static_cast<u64>(static_cast<u128>(a[c][k]) * iv % p);
            inv[c][k] = static_cast<u64>(static_cast<u128>(inv[c][k]) * iv % p);
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || !a[r][c]) continue;
            u64 f = a[r][c];
            for (int k = 0; k < n; ++k) {
                a[r][k] = static_cast<u64>((a[r][k] + static_cast<u128>(p - f) * a[c][k]) % p);
                inv[r][k] = static_cast<u64>((inv[r][k] + static_cast<u128>(p - f) * inv[c][k]) % p);
            }
        }
    }
    return inv;
}

u64 element_mod_p(const PadicElement& x)
{
    if (x.is_zero()) return 0;
    if (x.ival() < 0) throw Error("NotIntegral", "entry has negative valuation");
    return mod_p(x.to_mpz(), x.field()->p);
}

// Rows c_n(eta_l) for n <= cap from the affine branch, c_n = [t^{n-1}] (x0 + t)^i / Y(t).
std::vector<PS> affine_rows(const CurveModel& C, const std::vector<Diff>& diffs, long long nmax)
{
    const PadicField& K = C.K;
    int L = static_cast<int>(std::max<long long>(nmax, 1));
    PS Yinv = ps_inv(affine_branch(C, L), L);
    std::vector<PS> rows;
    PS lin{C.base->x0, PadicElement::one(K)};
    for (const auto& df : diffs) {
        PS xpow = ps_const(K, PadicElement::one(K), df.i + 1);
        for (int r = 0; r < df.i; ++r) xpow = ps_mul(xpow, lin, df.i + 1);
        PS s = ps_mul(xpow, Yinv, L);
        PS row(nmax + 1, PadicElement(K));
        for (long long n = 1; n <= nmax; ++n) row[n] = s[n - 1];
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<int> mu_of(const CurveModel& C, const std::vector<Diff>& diffs)
{
    std::vector<int> mu;
    if (C.base) {
        for (int i = 1; i <= C.genus; ++i) mu.push_back(i);
    } else {
        for (const auto& df : diffs) mu.push_back(df.o + 1);
    }
    return mu;
}

void validate_branch(const PadicField& K, int d, const std::vector<BranchFactor>& branch)
{
    if (d < 2) throw Error("BadModel", "d must be at least 2");
    if (K->p % static_cast<u64>(d) == 0) throw Error("BadReduction", "p divides d");
    if (branch.empty()) throw Error("BadModel", "no branch factors");
    int S = 0;
    for (const auto& b : branch) {
        if (b.poly.size() < 2 || b.poly.back() != 1) throw Error("BadModel", "branch factors must be monic of positive degree");
        if (b.mult < 1 || std::gcd(b.mult, d) != 1) throw Error("BadModel", "branch multiplicities must be coprime to d");
        S += b.mult * b.degree();
    }
    if (std::gcd(S, d) != 1) throw Error("BadModel", "more than one point over infinity");
    // Good reduction: the product of the factors is squarefree mod p.
    const u64 p = K->p;
    fp::Poly P{1};
    for (const auto& b : branch) {
        fp::Poly f;
        for (const auto& c : b.poly) f.push_back(mod_p(c, p));
        P = fp_mul(P, f, p);
    }
    fp::Poly dP;
    for (size_t i = 1; i < P.size(); ++i) dP.push_back(static_cast<u64>(static_cast<u128>(P[i]) * (i % p) % p));
    fp::trim(dP);
    if (dP.empty()) throw Error("BadReduction", "branch locus degenerates mod p");
    fp::Poly g = fp::gcd(P, dP, p);
    fp::trim(g);
    if (g.size() > 1) throw Error("BadReduction", "branch roots collide mod p");
}

} // namespace

std::vector<mpz_class> branch_product(const CurveModel& C)
{
    std::vector<mpz_class> F{1};
    for (const auto& b : C.branch) F = zpoly_mul(F, zpoly_pow(b.poly, b.mult));
    return F;
}

CurveModel superelliptic(const PadicField& K, int d, std::vector<BranchFactor> branch)
{
    validate_branch(K, d, branch);
    CurveModel C;
    C.K = K;
    C.d = d;
    C.branch = std::move(branch);
    for (const auto& b : C.branch) {
        C.S += b.mult * b.degree();
        C.B += b.degree();
    }
    C.genus = (C.B - 1) * (d - 1) / 2;
    for (int a = 1; a <= d; ++a)
        if ((static_cast<long long>(a) * C.S - 1) % d == 0) {
            C.alpha = a;
            C.beta = static_cast<int>((static_cast<long long>(a) * C.S - 1) / d);
            break;
        }
    C.automorphism_order = d;
    return C;
}

CurveModel fermat_quotient(const PadicField& K, int d, int a)
{
    if (a <= 1 || a >= d) throw Error("BadModel", "need 1 < a < d");
    CurveModel C = superelliptic(K, d, {{{0, 1}, a}, {{-1, 1}, d + 1 - a}});
    C.family = "fermat-quotient";
    return C;
}

CurveModel hyperelliptic_x5x(const PadicField& K, int g)
{
    std::vector<mpz_class> q(2 * g + 1, 0);
    q[0] = 1;
    q[2 * g] = 1;
    CurveModel C = superelliptic(K, 2, {{{0, 1}, 1}, {q, 1}});
    C.family = "hyperelliptic-x5x";
    C.automorphism_order = 4 * g;
    return C;
}

CurveModel power_plus_one(const PadicField& K, int l)
{
    std::vector<mpz_class> q(l + 2, 0);
    q[0] = 1;
    q[l + 1] = 1;
    CurveModel C = superelliptic(K, l, {{q, 1}});
    C.family = "power-plus-one";
    C.automorphism_order = l * (l + 1);
    return C;
}

CurveModel even_quadratic(const PadicField& K, int l, int a, int b)
{
    CurveModel C = superelliptic(K, l, {{{0, 1}, 2 * a}, {{1, 0, 1}, b}});
    C.family = "even-quadratic";
    C.automorphism_order = 2 * l;
    return C;
}

CurveModel with_affine_base(CurveModel C, const PadicElement& x0, const PadicElement& y0)
{
    if (C.d != 2) throw Error("Unsupported", "affine base points are supported on hyperelliptic models");
    for (const auto& b : C.branch)
        if (b.mult != 1) throw Error("BadModel", "hyperelliptic right-hand side must be squarefree");
    if (!x0.is_integral() || !y0.is_unit()) throw Error("RamifiedBasePoint", "base point must reduce to a non-ramified point");
    auto F = branch_product(C);
    std::vector<PadicElement> Fk;
    for (const auto& c : F) Fk.push_back(PadicElement::from_mpz(C.K, c));
    if (!(y0 * y0).equals(poly_eval(Fk, x0))) throw Error("NotOnCurve", "y0^2 != F(x0)");
    C.base = AffinePoint{x0, y0};
    C.family = "affine-base";
    C.automorphism_order.reset();
    return C;
}

int Divisor::degree(const CurveModel& C) const
{
    int s = at_infinity;
    for (auto [k, n] : at_branch) s += n * C.branch.at(k).degree();
    return s;
}

Expansion expand_at_basepoint(const CurveModel& C, int depth)
{
    const PadicField& K = C.K;
    if (C.base) {
        Expansion E;
        E.x = LaurentSeries::from_coeffs(K, -1, {PadicElement::one(K), C.base->x0}, true);
        int L = depth + 1;
        PS Y = affine_branch(C, L);
        E.y = to_laurent(K, 0, Y, L);
        return E;
    }
    int L = C.S + depth + 1;
    InfData D = infinity_data(C, L);
    return {to_laurent(K, C.d, D.Xt, C.d + depth + 1), to_laurent(K, C.S, D.Yt, C.S + depth + 1)};
}

LaurentSeries curve_residual(const CurveModel& C, const Expansion& E)
{
    const PadicField& K = C.K;
    LaurentSeries lhs = E.y;
    for (int i = 1; i < C.d; ++i) lhs = lhs * E.y;
    LaurentSeries rhs = LaurentSeries::monomial(PadicElement::one(K), 0, 0);
    for (const auto& b : C.branch) {
        LaurentSeries f = LaurentSeries::monomial(PadicElement::from_mpz(K, b.poly.back()), 0, 0);
        for (size_t i = b.poly.size() - 1; i-- > 0;) f = f * E.x + LaurentSeries::monomial(PadicElement::from_mpz(K, b.poly[i]), 0, 0);
        for (int m = 0; m < b.mult; ++m) rhs = rhs * f;
    }
    return lhs - rhs;
}

std::vector<int> generator_degrees(const CurveModel& C, const Divisor& D, int cap)
{
    std::vector<int> out;
    if (C.base) {
        if (!D.at_branch.empty() || D.at_infinity) throw Error("Unsupported", "twists at an affine base point");
        out.push_back(0);
        for (int s = C.genus + 1; s <= cap; ++s) out.push_back(s);
        return out;
    }
    for (int m = 0; m < C.d; ++m) {
        long long deg = static_cast<long long>(m) * C.S - D.at_infinity;
        for (size_t k = 0; k < C.branch.size(); ++k) {
            int nk = 0;
            for (auto [idx, n] : D.at_branch)
                if (idx == static_cast<int>(k)) nk += n;
            long long c = ceil_div(-nk - static_cast<long long>(m) * C.branch[k].mult, C.d);
            deg += static_cast<long long>(C.d) * C.branch[k].degree() * c;
        }
        for (long long s = deg; s <= cap; s += C.d) out.push_back(static_cast<int>(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

GrassPoint krichever_subspace(const CurveModel& C, const Divisor& D, int cap, int depth)
{
    const PadicField& K = C.K;
    for (auto [k, n] : D.at_branch)
        if (k < 0 || k >= static_cast<int>(C.branch.size())) throw Error("SupportCollision", "divisor point is not a branch point");
    std::vector<std::pair<int, LaurentSeries>> gens;
    if (C.base) {
        if (!D.at_branch.empty() || D.at_infinity) throw Error("Unsupported", "twists at an affine base point");
        int L = cap + depth + 1;
        PS Y = affine_branch(C, std::max(L, 1));
        gens.push_back({0, LaurentSeries::monomial(PadicElement::one(K), 0, -depth)});
        for (int s = C.genus + 1; s <= cap; ++s) {
            int len = s + depth + 1;
            PS z(len, PadicElement(K));
            for (int k = 0; k < len; ++k) z[k] = k < s ? Y[k].mul_int(2) : Y[k];
            gens.push_back({s, to_laurent(K, s, z, len)});
        }
    } else {
        int L = std::max(cap + depth + 1, 1);
        InfData I = infinity_data(C, L);
        L = I.L;
        int lmax = 0;
        std::vector<std::pair<long long, PS>> bases;
        for (int m = 0; m < C.d; ++m) {
            long long deg = static_cast<long long>(m) * C.S - D.at_infinity;
            PS base = ps_pow(I.Yt, m, L);
            long long xe = 0;
            for (size_t k = 0; k < C.branch.size(); ++k) {
                int nk = 0;
                for (auto [idx, n] : D.at_branch)
                    if (idx == static_cast<int>(k)) nk += n;
                long long c = ceil_div(-nk - static_cast<long long>(m) * C.branch[k].mult, C.d);
                deg += static_cast<long long>(C.d) * C.branch[k].degree() * c;
                xe += C.branch[k].degree() * c;
                if (c) base = ps_mul(base, ps_pow(I.F[k], c, L), L);
            }
            if (xe) base = ps_mul(base, ps_pow(I.Xt, xe, L), L);
            if (deg <= cap) lmax = std::max<int>(lmax, static_cast<int>((cap - deg) / C.d));
            bases.push_back({deg, std::move(base)});
        }
        std::vector<PS> xpow{ps_const(K, PadicElement::one(K), L)};
        for (int l = 1; l <= lmax; ++l) xpow.push_back(ps_mul(xpow.back(), I.Xt, L));
        for (const auto& [deg, base] : bases)
            for (long long s = deg, l = 0; s <= cap; s += C.d, ++l) {
                int len = static_cast<int>(std::clamp<long long>(s + depth + 1, 1, L));
                gens.push_back({static_cast<int>(s), to_laurent(K, static_cast<int>(s), ps_mul(base, xpow[l], len), len)});
            }
    }
    std::stable_sort(gens.begin(), gens.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<LaurentSeries> vs;
    for (auto& g : gens) vs.push_back(std::move(g.second));
    return standard_basis(vs, cap);
}

AffineRing affine_ring(const CurveModel& C, int cap, int depth)
{
    if (cap < 2 * C.genus) throw Error("CapTooSmall", "cap must reach 2g");
    AffineRing R;
    R.A = krichever_subspace(C, Divisor{}, cap, depth);
    std::set<int> deg(R.A.degrees.begin(), R.A.degrees.end());
    for (int n = 1; n <= cap; ++n)
        if (!deg.count(n)) R.gd.gaps.push_back(n);
    if (static_cast<int>(R.gd.gaps.size()) != C.genus) throw Error("GenusMismatch", "gap count differs from the genus");
    for (int s : R.A.degrees)
        if (s < 0) throw Error("GenusMismatch", "negative degree in the affine ring");
    auto rep = classify_integrality(R.A);
    for (int n = 1; n <= cap; ++n)
        if (!std::count(rep.reduction.degrees.begin(), rep.reduction.degrees.end(), n)) R.residue_gd.gaps.push_back(n);
    R.A.integrality = rep.cls;
    R.A.theorem_backed = rep.cls == Integrality::Strict && R.gd.gaps == R.residue_gd.gaps;
    return R;
}

HermiteBasis hermite_basis(const CurveModel& C, int cap)
{
    const PadicField& K = C.K;
    auto diffs = differentials(C);
    HermiteBasis H;
    H.mu = mu_of(C, diffs);
    if (cap < H.mu.back()) throw Error("CapTooSmall", "cap below the last gap");
    std::vector<PS> rows;
    if (C.base) {
        rows = affine_rows(C, diffs, cap);
    } else {
        int L = cap + 1;
        InfData I = infinity_data(C, L);
        for (const auto& df : diffs) {
            int xe = df.i;
            for (size_t k = 0; k < C.branch.size(); ++k) xe += C.branch[k].degree() * df.c[k];
            PS s = ps_mul(ps_pow(I.Xt, xe, L), ps_pow(I.Yt, -df.j, L), L);
            for (size_t k = 0; k < C.branch.size(); ++k)
                if (df.c[k]) s = ps_mul(s, ps_pow(I.F[k], df.c[k], L), L);
            s = ps_mul(s, I.dX, L);
            PS row(cap + 1, PadicElement(K));
            for (int n = df.o + 1; n <= cap; ++n) row[n] = -s[n - df.o - 1];
            rows.push_back(std::move(row));
        }
    }
    int g = C.genus;
    Matrix M(g, std::vector<PadicElement>(g, PadicElement(K)));
    for (int l = 0; l < g; ++l)
        for (int j = 0; j < g; ++j) M[l][j] = rows[l][H.mu[j]];
    H.normalizer = matrix_inverse(M);
    H.c.assign(g, std::vector<PadicElement>(cap + 1, PadicElement(K)));
    for (int i = 0; i < g; ++i)
        for (int n = 0; n <= cap; ++n) {
            PadicElement s(K);
            for (int l = 0; l < g; ++l) s += H.normalizer[i][l] * rows[l][n];
            H.c[i][n] = s;
        }
    return H;
}

std::vector<PadicElement> hermite_column(const CurveModel& C, const HermiteBasis& H, long long n)
{
    const PadicField& K = C.K;
    auto diffs = differentials(C);
    std::vector<PadicElement> col(diffs.size(), PadicElement(K));
    if (C.base) {
        auto rows = affine_rows(C, diffs, n);
        for (size_t l = 0; l < diffs.size(); ++l) col[l] = rows[l][n];
    } else {
        for (size_t l = 0; l < diffs.size(); ++l) col[l] = PadicElement::from_mpq(K, residue_coefficient(C, diffs[l], n));
    }
    std::vector<PadicElement> out(diffs.size(), PadicElement(K));
    for (size_t i = 0; i < diffs.size(); ++i)
        for (size_t l = 0; l < diffs.size(); ++l) out[i] += H.normalizer[i][l] * col[l];
    return out;
}

std::vector<u64> hermite_column_mod_p(const CurveModel& C, long long n)
{
    if (C.K->f != 1 || C.K->e != 1) throw Error("Unsupported", "reduction mod p requires the base field Q_p");
    const u64 p = C.K->p;
    auto diffs = differentials(C);
    auto mu = mu_of(C, diffs);
    int g = C.genus;
    std::vector<std::vector<u64>> M(g, std::vector<u64>(g, 0));
    std::vector<u64> col(g, 0);
    if (C.base) {
        long long nmax = std::max<long long>(n, mu.back());
        auto rows = affine_rows(C, diffs, nmax);
        for (int l = 0; l < g; ++l) {
            for (int j = 0; j < g; ++j) M[l][j] = element_mod_p(rows[l][mu[j]]);
            col[l] = element_mod_p(rows[l][n]);
        }
    } else {
        for (int l = 0; l < g; ++l) {
            for (int j = 0; j < g; ++j) M[l][j] = residue_coefficient_mod_p(C, diffs[l], mu[j]);
            col[l] = residue_coefficient_mod_p(C, diffs[l], n);
        }
    }
    auto Hn = inverse_mod(M, p);
    std::vector<u64> out(g, 0);
    for (int i = 0; i < g; ++i) {
        u128 s = 0;
        for (int l = 0; l < g; ++l) s = (s + static_cast<u128>(Hn[i][l]) * col[l]) % p;
        out[i] = static_cast<u64>(s);
    }
    return out;
}

StohrViana stohr_viana_matrix(const GrassPoint& A, const GapData& gd, int m)
{
    const PadicField& K = A.K;
    int g = static_cast<int>(gd.gaps.size());
    StohrViana R;
    R.m = m;
    R.e.assign(g, std::vector<PadicElement>(g, PadicElement(K)));
    for (int j = 0; j < g; ++j) {
        long long N = static_cast<long long>(m) * gd.gaps[j];
        if (N > A.cap) throw Error("CapTooSmall", "affine ring not materialized up to m * mu_g");
        auto gi = std::find(gd.gaps.begin(), gd.gaps.end(), static_cast<int>(N));
        if (gi != gd.gaps.end()) {
            R.e[gi - gd.gaps.begin()][j] = PadicElement::one(K);
            R.a.push_back(LaurentSeries::zero(K, 0, true));
            R.t.push_back(LaurentSeries::zero(K, 0, true));
            continue;
        }
        const LaurentSeries* z = A.element_of_degree(static_cast<int>(N));
        if (!z) throw Error("CapTooSmall", "missing basis element");
        for (int i = 0; i < g; ++i) R.e[i][j] = -z->coeff(gd.gaps[i]);
        R.a.push_back(*z);
        LaurentSeries tail = LaurentSeries::zero(K, z->floor(), z->exact_tail());
        for (int n = z->floor(); n <= -1; ++n) tail.set(n, -z->coeff(n));
        R.t.push_back(tail);
    }
    return R;
}

std::vector<std::vector<u64>> frobenius_matrix_mod_p(const CurveModel& C, int k)
{
    const u64 p = C.K->p;
    auto diffs = differentials(C);
    auto mu = mu_of(C, diffs);
    int g = C.genus;
    std::vector<std::vector<u64>> e(g, std::vector<u64>(g, 0));
    long long pk = 1;
    for (int i = 0; i < k; ++i) pk *= static_cast<long long>(p);
    for (int j = 0; j < g; ++j) {
        auto col = hermite_column_mod_p(C, pk * mu[j]);
        for (int i = 0; i < g; ++i) e[i][j] = col[i];
    }
    return e;
}

HasseWitt hasse_witt(const CurveModel& C)
{
    if (C.K->p < static_cast<u64>(2 * C.genus)) throw Error("SmallPrime", "p < 2g");
    HasseWitt H;
    H.matrix = frobenius_matrix_mod_p(C, 1);
    H.ordinary = det_mod(H.matrix, C.K->p) != 0;
    return H;
}

std::vector<std::vector<u64>> matmul_mod(const std::vector<std::vector<u64>>& a,
                                         const std::vector<std::vector<u64>>& b, u64 p)
{
    size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
    std::vector<std::vector<u64>> r(n, std::vector<u64>(m, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) {
            u128 s = 0;
            for (size_t t = 0; t < k; ++t) s = (s + static_cast<u128>(a[i][t]) * b[t][j]) % p;
            r[i][j] = static_cast<u64>(s);
        }
    return r;
}

u64 det_mod(std::vector<std::vector<u64>> a, u64 p)
{
    int n = static_cast<int>(a.size());
    u64 det = 1;
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (a[r][c]) { piv = r; break; }
        if (piv < 0) return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = (p - det) % p;
        }
        det = static_cast<u64>(static_cast<u128>(det) * a[c][c] % p);
        u64 iv = fp::inv(a[c][c], p);
        for (int r = c + 1; r < n; ++r) {
            if (!a[r][c]) continue;
            u64 f = static_cast<u64>(static_cast<u128>(a[r][c]) * iv % p);
            for (int k = c; k < n; ++k) a[r][k] = static_cast<u64>((a[r][k] + static_cast<u128>(p - f) * a[c][k]) % p);
        }
    }
    return det;
}

Matrix identity_matrix(const PadicField& K, int n)
{
    Matrix I(n, std::vector<PadicElement>(n, PadicElement(K)));
    for (int i = 0; i < n; ++i) I[i][i] = PadicElement::one(K);
    return I;
}

Matrix matrix_inverse(const Matrix& M0)
{
    Matrix M = M0;
    int n = static_cast<int>(M.size());
    const PadicField& K = M[0][0].field();
    Matrix inv = identity_matrix(K, n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r) {
            if (M[r][c].is_zero()) continue;
            if (piv < 0 || M[r][c].ival() < M[piv][c].ival()) piv = r;
        }
        if (piv < 0) throw Error("NotNormalizable", "singular normalization block");
        std::swap(M[c], M[piv]);
        std::swap(inv[c], inv[piv]);
        PadicElement iv = M[c][c].inv();
        for (int k = 0; k < n; ++k) {
            M[c][k] = M[c][k] * iv;
            inv[c][k] = inv[c][k] * iv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || M[r][c].is_zero()) continue;
            PadicElement f = M[r][c];
            for (int k = 0; k < n; ++k) {
                M[r][k] -= f * M[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

} // namespace soliton
