#include "soliton/padic.hpp"

#include <algorithm>
#include <sstream>

#include "soliton/error.hpp"

namespace soliton {

// ---------------------------------------------------------------- F_p polynomials

namespace fp {

u64 inv(u64 a, u64 p)
{
    mpz_class x = static_cast<unsigned long>(a % p), m = static_cast<unsigned long>(p), r;
    if (mpz_invert(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t()) == 0)
        throw Error("NotUnit", "inverse of zero in F_p");
    return r.get_ui();
}

void trim(Poly& a)
{
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly sub(const Poly& a, const Poly& b, u64 p)
{
    Poly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        u64 x = i < a.size() ? a[i] : 0, y = i < b.size() ? b[i] : 0;
        r[i] = (x + p - y) % p;
    }
    trim(r);
    return r;
}

Poly rem(Poly a, const Poly& m, u64 p)
{
    trim(a);
    size_t n = m.size() - 1;
    u64 li = inv(m.back(), p);
    while (a.size() > n) {
        u64 c = a.back() * li % p;
        size_t sh = a.size() - 1 - n;
        for (size_t i = 0; i <= n; ++i) a[sh + i] = (a[sh + i] + p - c * m[i] % p) % p;
        trim(a);
    }
    return a;
}

Poly mulmod(const Poly& a, const Poly& b, const Poly& m, u64 p)
{
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i])
            for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return rem(std::move(r), m, p);
}

Poly powmod(const Poly& a, const mpz_class& e, const Poly& m, u64 p)
{
    Poly r = rem(Poly{1}, m, p), b = rem(a, m, p);
    size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    if (e == 0) return r;
    for (size_t i = 0; i < bits; ++i) {
        if (mpz_tstbit(e.get_mpz_t(), i)) r = mulmod(r, b, m, p);
        b = mulmod(b, b, m, p);
    }
    return r;
}

Poly gcd(Poly a, Poly b, u64 p)
{
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        u64 li = inv(a.back(), p);
        for (auto& c : a) c = c * li % p;
    }
    return a;
}

namespace {
std::vector<int> prime_divisors(int n)
{
    std::vector<int> r;
    for (int q = 2; q * q <= n; ++q)
        if (n % q == 0) {
            r.push_back(q);
            while (n % q == 0) n /= q;
        }
    if (n > 1) r.push_back(n);
    return r;
}
} // namespace

bool irreducible(const Poly& m, u64 p)
{
    int n = static_cast<int>(m.size()) - 1;
    if (n <= 0) return false;
    if (n == 1) return true;
    Poly X{0, 1};
    mpz_class P = static_cast<unsigned long>(p), q;
    mpz_pow_ui(q.get_mpz_t(), P.get_mpz_t(), n);
    if (sub(powmod(X, q, m, p), X, p) != Poly{}) return false;
    for (int r : prime_divisors(n)) {
        mpz_pow_ui(q.get_mpz_t(), P.get_mpz_t(), n / r);
        Poly g = gcd(m, sub(powmod(X, q, m, p), X, p), p);
        if (g.size() != 1) return false;
    }
    return true;
}

} // namespace fp

namespace {

std::vector<mpz_class> prime_factors(mpz_class n)
{
    std::vector<mpz_class> r;
    for (unsigned long q = 2; q < 20000000UL && mpz_class(q) * q <= n; ++q)
        if (mpz_divisible_ui_p(n.get_mpz_t(), q)) {
            r.emplace_back(q);
            while (mpz_divisible_ui_p(n.get_mpz_t(), q)) n /= q;
        }
    if (n > 1) r.push_back(n);
    return r;
}

} // namespace

// ---------------------------------------------------------------- residue field

ResidueField::ResidueField(u64 p, std::vector<u64> modulus) : p_(p), mod_(std::move(modulus))
{
    f_ = static_cast<int>(mod_.size()) - 1;
}

mpz_class ResidueField::size() const
{
    mpz_class q, P = static_cast<unsigned long>(p_);
    mpz_pow_ui(q.get_mpz_t(), P.get_mpz_t(), f_);
    return q;
}

ResidueField::Elt ResidueField::one() const
{
    Elt r(f_, 0);
    r[0] = 1 % p_;
    return r;
}

ResidueField::Elt ResidueField::from_int(long long x) const
{
    Elt r(f_, 0);
    long long m = x % static_cast<long long>(p_);
    if (m < 0) m += static_cast<long long>(p_);
    r[0] = static_cast<u64>(m);
    return r;
}

ResidueField::Elt ResidueField::gen() const
{
    if (f_ == 1) return from_int(static_cast<long long>((p_ - mod_[0]) % p_));
    Elt r(f_, 0);
    r[1] = 1;
    return r;
}

bool ResidueField::is_zero(const Elt& a) const
{
    return std::all_of(a.begin(), a.end(), [](u64 c) { return c == 0; });
}

bool ResidueField::is_one(const Elt& a) const
{
    return a == one();
}

ResidueField::Elt ResidueField::add(const Elt& a, const Elt& b) const
{
    Elt r(f_);
    for (int i = 0; i < f_; ++i) r[i] = (a[i] + b[i]) % p_;
    return r;
}

ResidueField::Elt ResidueField::sub(const Elt& a, const Elt& b) const
{
    Elt r(f_);
    for (int i = 0; i < f_; ++i) r[i] = (a[i] + p_ - b[i]) % p_;
    return r;
}

ResidueField::Elt ResidueField::neg(const Elt& a) const
{
    Elt r(f_);
    for (int i = 0; i < f_; ++i) r[i] = (p_ - a[i]) % p_;
    return r;
}

ResidueField::Elt ResidueField::scale(const Elt& a, u64 c) const
{
    Elt r(f_);
    for (int i = 0; i < f_; ++i) r[i] = a[i] * (c % p_) % p_;
    return r;
}

ResidueField::Elt ResidueField::mul(const Elt& a, const Elt& b) const
{
    if (f_ == 1) return Elt{a[0] * b[0] % p_};
    fp::Poly r = fp::mulmod(a, b, mod_, p_);
    r.resize(f_, 0);
    return r;
}

ResidueField::Elt ResidueField::pow(const Elt& a, const mpz_class& e) const
{
    if (e < 0) return pow(inv(a), -e);
    Elt r = one(), b = a;
    size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    if (e == 0) return r;
    for (size_t i = 0; i < bits; ++i) {
        if (mpz_tstbit(e.get_mpz_t(), i)) r = mul(r, b);
        b = mul(b, b);
    }
    return r;
}

ResidueField::Elt ResidueField::inv(const Elt& a) const
{
    if (is_zero(a)) throw Error("NotUnit", "inverse of zero in residue field");
    return pow(a, size() - 2);
}

ResidueField::Elt ResidueField::element(u64 i) const
{
    Elt r(f_, 0);
    for (int k = 0; k < f_; ++k) { r[k] = i % p_; i /= p_; }
    return r;
}

u64 ResidueField::index(const Elt& a) const
{
    u64 r = 0;
    for (int k = f_ - 1; k >= 0; --k) r = r * p_ + a[k];
    return r;
}

mpz_class ResidueField::order(const Elt& a) const
{
    if (is_zero(a)) throw Error("NotUnit", "order of zero");
    mpz_class n = size() - 1;
    for (const auto& r : prime_factors(n)) {
        while (mpz_divisible_p(n.get_mpz_t(), r.get_mpz_t()) && is_one(pow(a, n / r))) n /= r;
    }
    return n;
}

// ---------------------------------------------------------------- raw O_K arithmetic

namespace {

// Reduces r (length >= f) modulo the monic polynomial m of degree f, in place.
void zeta_reduce(const Zmod& Z, std::vector<u128>& r, const std::vector<u128>& m, int f)
{
    for (int k = static_cast<int>(r.size()) - 1; k >= f; --k) {
        u128 c = r[k];
        if (!c) continue;
        for (int i = 0; i < f; ++i) r[k - f + i] = Z.sub(r[k - f + i], Z.mul(c, m[i]));
        r[k] = 0;
    }
    r.resize(f);
}

Raw polymulmod(const Zmod& Z, const Raw& a, const Raw& b, const std::vector<u128>& m, int f)
{
    if (f == 1) return Raw{Z.mul(a[0], b[0])};
    std::vector<Acc> acc(2 * f - 1);
    for (int i = 0; i < f; ++i)
        if (a[i])
            for (int j = 0; j < f; ++j)
                if (b[j]) acc[i + j].add_mul(a[i], b[j]);
    Raw r(2 * f - 1);
    for (int k = 0; k < 2 * f - 1; ++k) r[k] = Z.reduce(acc[k]);
    zeta_reduce(Z, r, m, f);
    return r;
}

int vec_val(const Zmod& Z, const std::vector<mpz_class>& v, u64 p, int N)
{
    int best = N;
    for (const auto& c : v) {
        if (c == 0) continue;
        mpz_class x = c;
        int k = 0;
        while (k < N && mpz_divisible_ui_p(x.get_mpz_t(), p)) { x /= static_cast<unsigned long>(p); ++k; }
        best = std::min(best, k);
    }
    (void)Z;
    return best;
}

} // namespace

Raw FieldData::fmul(const Raw& a, const Raw& b) const
{
    return polymulmod(Z, a, b, unram, f);
}

Raw FieldData::finv(const Raw& a) const
{
    ResidueField::Elt r(f);
    for (int i = 0; i < f; ++i) r[i] = static_cast<u64>(a[i] % p);
    ResidueField::Elt ri = res.inv(r);
    Raw z(f);
    for (int i = 0; i < f; ++i) z[i] = ri[i];
    for (int prec = 1; prec < N; prec *= 2) {
        Raw az = fmul(a, z);
        Raw two(f, 0);
        two[0] = 2;
        for (int i = 0; i < f; ++i) two[i] = Z.sub(two[i], az[i]);
        z = fmul(z, two);
    }
    return z;
}

Raw FieldData::raw_one() const
{
    Raw r(dim(), 0);
    r[0] = 1;
    return r;
}

Raw FieldData::raw_add(const Raw& a, const Raw& b) const
{
    Raw r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Z.add(a[i], b[i]);
    return r;
}

Raw FieldData::raw_sub(const Raw& a, const Raw& b) const
{
    Raw r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Z.sub(a[i], b[i]);
    return r;
}

Raw FieldData::raw_neg(const Raw& a) const
{
    Raw r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Z.neg(a[i]);
    return r;
}

Raw FieldData::raw_scale(const Raw& a, u128 c) const
{
    Raw r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] ? Z.mul(a[i], c) : 0;
    return r;
}

Raw FieldData::reduce_grid(std::vector<Acc>& grid) const
{
    const int F2 = 2 * f - 1, E2 = 2 * e - 1;
    std::vector<Raw> rows(E2);
    for (int j = 0; j < E2; ++j) {
        Raw r(F2);
        for (int i = 0; i < F2; ++i) r[i] = Z.reduce(grid[j * F2 + i]);
        if (f > 1) zeta_reduce(Z, r, unram, f);
        rows[j] = std::move(r);
    }
    Raw out(dim(), 0);
    if (e == 1) return rows[0];
    if (f == 1) {
        std::vector<Acc> acc(e);
        for (int j = 0; j < e; ++j) acc[j].add(rows[j][0]);
        for (int k = 0; k + e < E2; ++k) {
            u128 c = rows[e + k][0];
            if (!c) continue;
            const Raw& t = top[k];
            for (int j = 0; j < e; ++j)
                if (t[j]) acc[j].add_mul(c, t[j]);
        }
        for (int j = 0; j < e; ++j) out[j] = Z.reduce(acc[j]);
        return out;
    }
    std::vector<Acc> acc(e * F2);
    for (int j = 0; j < e; ++j)
        for (int i = 0; i < f; ++i) acc[j * F2 + i].add(rows[j][i]);
    for (int k = 0; k + e < E2; ++k) {
        const Raw& c = rows[e + k];
        const Raw& t = top[k];
        for (int j = 0; j < e; ++j)
            for (int i1 = 0; i1 < f; ++i1) {
                if (!c[i1]) continue;
                for (int i2 = 0; i2 < f; ++i2)
                    if (t[j * f + i2]) acc[j * F2 + i1 + i2].add_mul(c[i1], t[j * f + i2]);
            }
    }
    for (int j = 0; j < e; ++j) {
        Raw r(F2);
        for (int i = 0; i < F2; ++i) r[i] = Z.reduce(acc[j * F2 + i]);
        zeta_reduce(Z, r, unram, f);
        for (int i = 0; i < f; ++i) out[j * f + i] = r[i];
    }
    return out;
}

Raw FieldData::raw_mul(const Raw& a, const Raw& b) const
{
    if (e == 1 && f == 1) return Raw{Z.mul(a[0], b[0])};
    const int F2 = 2 * f - 1;
    std::vector<Acc> grid((2 * e - 1) * F2);
    for (int j1 = 0; j1 < e; ++j1)
        for (int i1 = 0; i1 < f; ++i1) {
            u128 x = a[j1 * f + i1];
            if (!x) continue;
            for (int j2 = 0; j2 < e; ++j2) {
                Acc* row = &grid[(j1 + j2) * F2 + i1];
                const u128* y = &b[j2 * f];
                for (int i2 = 0; i2 < f; ++i2)
                    if (y[i2]) row[i2].add_mul(x, y[i2]);
            }
        }
    return reduce_grid(grid);
}

Raw FieldData::raw_mul_pi(const Raw& a) const
{
    Raw r(dim(), 0);
    for (int j = 0; j + 1 < e; ++j)
        for (int i = 0; i < f; ++i) r[(j + 1) * f + i] = a[j * f + i];
    Raw hi(a.begin() + (e - 1) * f, a.begin() + e * f);
    for (int j = 0; j < e; ++j) {
        Raw t = fmul(hi, eis[j]);
        for (int i = 0; i < f; ++i) r[j * f + i] = Z.sub(r[j * f + i], t[i]);
    }
    return r;
}

Raw FieldData::raw_div_pi(const Raw& a) const
{
    Raw r(dim(), 0);
    for (int j = 1; j < e; ++j)
        for (int i = 0; i < f; ++i) r[(j - 1) * f + i] = a[j * f + i];
    Raw a0(f);
    for (int i = 0; i < f; ++i) {
        if (a[i] % p) throw Error("NotDivisible", "division by the uniformizer");
        a0[i] = Z.div_p(a[i], 1);
    }
    for (int j = 0; j < e; ++j) {
        Raw qj(q.begin() + j * f, q.begin() + (j + 1) * f);
        Raw t = fmul(a0, qj);
        for (int i = 0; i < f; ++i) r[j * f + i] = Z.add(r[j * f + i], t[i]);
    }
    return r;
}

Raw FieldData::raw_div_p(const Raw& a, int s) const
{
    if (s <= 0) return a;
    Raw r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Z.div_p(a[i], s);
    return r;
}

Raw FieldData::raw_shift(const Raw& a, int m) const
{
    if (m <= 0) return a;
    if (m >= cap()) return raw_zero();
    int s = m / e;
    Raw t = (e == 1 && f == 1) ? raw_scale(a, pw[m][0]) : raw_mul(pw[m], a);
    return s ? raw_scale(t, Z.ppow(s)) : t;
}

Raw FieldData::raw_unit_inv(const Raw& a) const
{
    if (e == 1 && f == 1) return Raw{Z.inv(a[0])};
    ResidueField::Elt r = raw_residue(a);
    Raw z = raw_from_residue(res.inv(r));
    Raw two = raw_zero();
    for (int prec = 1; prec < cap(); prec *= 2) {
        Raw az = raw_mul(a, z);
        Raw t = raw_neg(az);
        t[0] = Z.add(t[0], 2);
        z = raw_mul(z, t);
    }
    return z;
}

Raw FieldData::w_power(long long s) const
{
    if (s >= 0 && s < static_cast<long long>(wpow.size())) return wpow[s];
    if (s < 0 && -s < static_cast<long long>(wipow.size())) return wipow[-s];
    const Raw& base = s >= 0 ? wpow[1] : wipow[1];
    long long n = s >= 0 ? s : -s;
    Raw r = raw_one(), b = base;
    while (n) {
        if (n & 1) r = raw_mul(r, b);
        b = raw_mul(b, b);
        n >>= 1;
    }
    return r;
}

int FieldData::raw_val(const Raw& a) const
{
    int best = cap();
    for (int j = 0; j < e; ++j)
        for (int i = 0; i < f; ++i) {
            u128 c = a[j * f + i];
            if (!c) continue;
            int v = e * Z.val(c) + j;
            if (v < best) best = v;
        }
    return best;
}

bool FieldData::raw_is_zero(const Raw& a) const
{
    return std::all_of(a.begin(), a.end(), [](u128 c) { return c == 0; });
}

ResidueField::Elt FieldData::raw_residue(const Raw& a) const
{
    ResidueField::Elt r(f);
    for (int i = 0; i < f; ++i) r[i] = static_cast<u64>(a[i] % p);
    return r;
}

Raw FieldData::raw_from_residue(const ResidueField::Elt& a) const
{
    Raw r = raw_zero();
    for (int i = 0; i < f; ++i) r[i] = a[i];
    return r;
}

// ---------------------------------------------------------------- field construction

namespace {

std::vector<u64> find_modulus(u64 p, int f)
{
    if (f == 1) {
        mpz_class q = static_cast<unsigned long>(p - 1);
        auto primes = prime_factors(q);
        for (u64 g = 1; g < p; ++g) {
            bool prim = true;
            for (const auto& r : primes) {
                mpz_class e = q / r, G = static_cast<unsigned long>(g), m = static_cast<unsigned long>(p), x;
                mpz_powm(x.get_mpz_t(), G.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
                if (x == 1) { prim = false; break; }
            }
            if (prim || p == 2) return {(p - g) % p, 1};
        }
    }
    mpz_class P = static_cast<unsigned long>(p), q;
    mpz_pow_ui(q.get_mpz_t(), P.get_mpz_t(), f);
    auto primes = prime_factors(q - 1);
    mpz_class count = q;
    for (mpz_class idx = 0; idx < count; ++idx) {
        fp::Poly m(f + 1, 0);
        mpz_class t = idx;
        for (int i = 0; i < f; ++i) {
            m[i] = mpz_class(t % P).get_ui();
            t /= P;
        }
        m[f] = 1;
        if (m[0] == 0) continue;
        if (!fp::irreducible(m, p)) continue;
        bool prim = true;
        for (const auto& r : primes) {
            fp::Poly x = fp::powmod(fp::Poly{0, 1}, (q - 1) / r, m, p);
            if (x == fp::Poly{1}) { prim = false; break; }
        }
        if (prim) return m;
    }
    throw Error("NoModulus", "no primitive irreducible polynomial found");
}

} // namespace

PadicField make_field(u64 p, int f, const std::vector<std::vector<mpz_class>>& eis_in, int N)
{
    if (p < 2 || !mpz_class(static_cast<unsigned long>(p)).get_mpz_t() ||
        mpz_probab_prime_p(mpz_class(static_cast<unsigned long>(p)).get_mpz_t(), 30) == 0)
        throw Error("NotPrime", "p must be prime");
    if (f < 1) throw Error("BadDegree", "unramified degree must be >= 1");
    auto K = std::make_shared<FieldData>();
    K->p = p;
    K->f = f;
    K->N = N;
    K->Z = Zmod(p, N);
    const Zmod& Z = K->Z;

    // Teichmuller-normalized unramified modulus.
    std::vector<u64> m = find_modulus(p, f);
    K->res = ResidueField(p, m);
    if (f == 1) {
        mpz_class g = static_cast<unsigned long>((p - m[0]) % p), e, P = static_cast<unsigned long>(p);
        mpz_pow_ui(e.get_mpz_t(), P.get_mpz_t(), N - 1);
        u128 t = Z.pow(Z.from_mpz(g), e);
        K->unram = {Z.neg(t), 1};
    } else {
        std::vector<u128> lift(f + 1);
        for (int i = 0; i <= f; ++i) lift[i] = m[i];
        Raw X(f, 0);
        X[1] = 1;
        mpz_class P = static_cast<unsigned long>(p), qe;
        mpz_pow_ui(qe.get_mpz_t(), P.get_mpz_t(), static_cast<unsigned long>(f) * (N - 1));
        Raw t = Raw(f, 0);
        t[0] = 1;
        {
            Raw b = X;
            size_t bits = mpz_sizeinbase(qe.get_mpz_t(), 2);
            for (size_t i = 0; i < bits; ++i) {
                if (mpz_tstbit(qe.get_mpz_t(), i)) t = polymulmod(Z, t, b, lift, f);
                b = polymulmod(Z, b, b, lift, f);
            }
        }
        // Product of (Y - t^{p^i}), coefficients in O_F'.
        std::vector<Raw> poly{Raw(f, 0)};
        poly[0][0] = 1;
        Raw ti = t;
        for (int i = 0; i < f; ++i) {
            std::vector<Raw> np(poly.size() + 1, Raw(f, 0));
            for (size_t k = 0; k < poly.size(); ++k) {
                for (int c = 0; c < f; ++c) np[k + 1][c] = Z.add(np[k + 1][c], poly[k][c]);
                Raw pr = polymulmod(Z, poly[k], ti, lift, f);
                for (int c = 0; c < f; ++c) np[k][c] = Z.sub(np[k][c], pr[c]);
            }
            poly = std::move(np);
            Raw b = ti, r(f, 0);
            r[0] = 1;
            for (u64 k = p; k; k >>= 1) {
                if (k & 1) r = polymulmod(Z, r, b, lift, f);
                b = polymulmod(Z, b, b, lift, f);
            }
            ti = r;
        }
        K->unram.resize(f + 1);
        for (int k = 0; k <= f; ++k) {
            for (int c = 1; c < f; ++c)
                if (poly[k][c] != 0) throw Error("Internal", "Teichmuller modulus not rational");
            K->unram[k] = poly[k][0];
        }
    }

    // Eisenstein data.
    std::vector<std::vector<mpz_class>> eis = eis_in;
    if (eis.empty()) {
        eis.assign(2, std::vector<mpz_class>(f, 0));
        eis[0][0] = -mpz_class(static_cast<unsigned long>(p));
        eis[1][0] = 1;
    }
    for (auto& c : eis) c.resize(f, 0);
    int e = static_cast<int>(eis.size()) - 1;
    if (e < 1) throw Error("NonEisenstein", "Eisenstein polynomial must have degree >= 1");
    K->e = e;
    if (eis[e][0] != 1 || std::any_of(eis[e].begin() + 1, eis[e].end(), [](const mpz_class& c) { return c != 0; }))
        throw Error("NonEisenstein", "leading coefficient must be 1");
    if (vec_val(Z, eis[0], p, N + 2) != 1)
        throw Error("NonEisenstein", "constant term must have valuation exactly 1");
    for (int j = 1; j < e; ++j)
        if (vec_val(Z, eis[j], p, N + 2) < 1)
            throw Error("NonEisenstein", "middle coefficient must have positive valuation");
    K->eis.assign(e + 1, Raw(f, 0));
    for (int j = 0; j <= e; ++j)
        for (int i = 0; i < f; ++i) K->eis[j][i] = Z.from_mpz(eis[j][i]);
    K->eis_input.clear();
    for (const auto& c : eis)
        for (const auto& x : c) K->eis_input.push_back(x);

    const int D = e * f;
    // Reduction table: pi^{e+k}.
    {
        Raw cur(D, 0);
        for (int j = 0; j < e; ++j)
            for (int i = 0; i < f; ++i) cur[j * f + i] = Z.neg(K->eis[j][i]);
        K->top.clear();
        for (int k = 0; k + 1 < e; ++k) {
            K->top.push_back(cur);
            cur = K->raw_mul_pi(cur);
        }
    }
    // w = pi^e / p = -sum (E_j / p) pi^j.
    Raw w(D, 0);
    for (int j = 0; j < e; ++j)
        for (int i = 0; i < f; ++i) {
            mpz_class c = eis[j][i] / mpz_class(static_cast<unsigned long>(p));
            w[j * f + i] = Z.neg(Z.from_mpz(c));
        }
    // q = p / pi = -(1/eps) sum_{j>=1} E_j pi^{j-1}, eps = E_0 / p.
    {
        Raw eps(f);
        for (int i = 0; i < f; ++i) eps[i] = Z.from_mpz(eis[0][i] / mpz_class(static_cast<unsigned long>(p)));
        Raw ei = K->finv(eps);
        K->q.assign(D, 0);
        for (int j = 1; j <= e; ++j) {
            Raw t = K->fmul(ei, K->eis[j]);
            for (int i = 0; i < f; ++i) K->q[(j - 1) * f + i] = Z.neg(t[i]);
        }
    }
    K->wpow.assign(1, K->raw_one());
    K->wipow.assign(1, K->raw_one());
    if (N > 1) {
        K->wpow.push_back(w);
        Raw wi = K->raw_unit_inv(w);
        K->wipow.push_back(wi);
        for (int s = 2; s < N; ++s) {
            K->wpow.push_back(K->raw_mul(K->wpow.back(), w));
            K->wipow.push_back(K->raw_mul(K->wipow.back(), wi));
        }
    }
    K->pw.resize(static_cast<size_t>(e) * N);
    for (int s = 0; s < N; ++s) {
        Raw cur = K->wpow[s];
        for (int r = 0; r < e; ++r) {
            K->pw[s * e + r] = cur;
            if (r + 1 < e) cur = K->raw_mul_pi(cur);
        }
    }
    return K;
}

PadicField make_field(u64 p, int f, const std::vector<mpz_class>& eis, int N)
{
    std::vector<std::vector<mpz_class>> v;
    for (const auto& c : eis) v.push_back({c});
    return make_field(p, f, v, N);
}

PadicField make_qp(u64 p, int N)
{
    return make_field(p, 1, std::vector<std::vector<mpz_class>>{}, N);
}

bool same_field(const PadicField& a, const PadicField& b)
{
    if (a == b) return true;
    if (!a || !b) return false;
    return a->p == b->p && a->f == b->f && a->N == b->N && a->eis_input == b->eis_input;
}

// ---------------------------------------------------------------- elements

namespace {

void check_same(const PadicField& a, const PadicField& b)
{
    if (!same_field(a, b)) throw Error("FieldMismatch", "operands live in different fields");
}

} // namespace

namespace {

int sat_add(int a, int b)
{
    long long s = static_cast<long long>(a) + b;
    if (a == PadicElement::kInf || b == PadicElement::kInf || s >= PadicElement::kInf) return PadicElement::kInf;
    return static_cast<int>(s);
}

} // namespace

PadicElement::PadicElement(PadicField K, int v, Raw unit, int prec)
    : K_(std::move(K)), v_(v), u_(std::move(unit)), prec_(prec)
{
    if (v_ == kInf) { u_.clear(); return; }
    int relcap = sat_add(v_, K_->cap());
    if (prec_ > relcap) prec_ = relcap;
    if (v_ >= prec_) { v_ = kInf; u_.clear(); }
}

PadicElement PadicElement::zero_at(const PadicField& K, int prec)
{
    PadicElement z(K);
    z.prec_ = prec;
    return z;
}

PadicElement PadicElement::from_int(const PadicField& K, long long x)
{
    return from_mpz(K, mpz_class(static_cast<long>(x)));
}

PadicElement PadicElement::from_mpz(const PadicField& K, const mpz_class& x)
{
    if (x == 0) return PadicElement(K);
    mpz_class y = x;
    int s = 0;
    while (mpz_divisible_ui_p(y.get_mpz_t(), K->p)) { y /= static_cast<unsigned long>(K->p); ++s; }
    Raw u = K->raw_zero();
    u[0] = K->Z.from_mpz(y);
    if (s) u = K->raw_mul(u, K->w_power(-s));
    return PadicElement(K, K->e * s, std::move(u), kInf);
}

PadicElement PadicElement::from_mpq(const PadicField& K, const mpq_class& x)
{
    return from_mpz(K, x.get_num()) / from_mpz(K, x.get_den());
}

PadicElement PadicElement::from_raw(const PadicField& K, Raw c, int shift, int prec)
{
    int t = K->raw_val(c);
    if (t >= K->cap()) return zero_at(K, std::min(prec, sat_add(shift, K->cap())));
    int s = t / K->e, r = t % K->e;
    if (s) {
        c = K->raw_div_p(c, s);
        c = K->raw_mul(c, K->w_power(-s));
    }
    for (int i = 0; i < r; ++i) c = K->raw_div_pi(c);
    return PadicElement(K, shift + t, std::move(c), std::min(prec, sat_add(shift, K->cap())));
}

PadicElement PadicElement::uniformizer(const PadicField& K)
{
    return PadicElement(K, 1, K->raw_one());
}

PadicElement PadicElement::zeta(const PadicField& K)
{
    Raw u = K->raw_zero();
    if (K->f == 1) u[0] = K->Z.neg(K->unram[0]);
    else u[1] = 1;
    return PadicElement(K, 0, std::move(u));
}

PadicElement PadicElement::teichmuller(const PadicField& K, const ResidueField::Elt& a)
{
    if (K->res.is_zero(a)) return PadicElement(K);
    Raw x(K->f);
    for (int i = 0; i < K->f; ++i) x[i] = a[i];
    mpz_class P = static_cast<unsigned long>(K->p), qe;
    mpz_pow_ui(qe.get_mpz_t(), P.get_mpz_t(), static_cast<unsigned long>(K->f) * (K->N - 1));
    Raw t(K->f, 0);
    t[0] = 1;
    size_t bits = mpz_sizeinbase(qe.get_mpz_t(), 2);
    for (size_t i = 0; i < bits; ++i) {
        if (mpz_tstbit(qe.get_mpz_t(), i)) t = K->fmul(t, x);
        x = K->fmul(x, x);
    }
    Raw u = K->raw_zero();
    for (int i = 0; i < K->f; ++i) u[i] = t[i];
    return PadicElement(K, 0, std::move(u));
}

Rational PadicElement::val() const
{
    if (is_zero()) throw Error("ZeroValuation", "valuation of zero");
    return Rational(v_, K_->e);
}

Raw PadicElement::raw() const
{
    if (is_zero()) return K_->raw_zero();
    if (v_ < 0) throw Error("NotIntegral", "raw coordinates of a non-integral element");
    return K_->raw_shift(u_, v_);
}

ResidueField::Elt PadicElement::residue() const
{
    if (!is_zero() && v_ < 0) throw Error("NotIntegral", "residue of a non-integral element");
    if (is_zero() || v_ > 0) return K_->res.zero();
    return K_->raw_residue(u_);
}

PadicElement PadicElement::operator-() const
{
    if (is_zero()) return *this;
    return PadicElement(K_, v_, K_->raw_neg(u_), prec_);
}

PadicElement PadicElement::operator+(const PadicElement& o) const
{
    if (!K_) return o;
    if (!o.K_) return *this;
    check_same(K_, o.K_);
    int P = std::min(prec_, o.prec_);
    if (o.is_zero()) return PadicElement(K_, v_, u_, P);
    if (is_zero()) return PadicElement(K_, o.v_, o.u_, P);
    const PadicElement& a = v_ <= o.v_ ? *this : o;
    const PadicElement& b = v_ <= o.v_ ? o : *this;
    long long m = static_cast<long long>(b.v_) - a.v_;
    if (m >= K_->cap()) return PadicElement(K_, a.v_, a.u_, P);
    if (m == 0) return from_raw(K_, K_->raw_add(a.u_, b.u_), a.v_, P);
    Raw t = K_->raw_shift(b.u_, static_cast<int>(m));
    return PadicElement(K_, a.v_, K_->raw_add(a.u_, t), P);
}

PadicElement PadicElement::operator-(const PadicElement& o) const
{
    return *this + (-o);
}

PadicElement PadicElement::operator*(const PadicElement& o) const
{
    if (!K_ || !o.K_) return PadicElement();
    check_same(K_, o.K_);
    if (is_zero() || o.is_zero()) {
        int pa = is_zero() ? prec_ : v_;
        int pb = o.is_zero() ? o.prec_ : o.v_;
        return zero_at(K_, sat_add(pa, pb));
    }
    int P = std::min(sat_add(prec_, o.v_), sat_add(o.prec_, v_));
    return PadicElement(K_, v_ + o.v_, K_->raw_mul(u_, o.u_), P);
}

PadicElement PadicElement::inv() const
{
    if (is_zero()) throw Error("DivisionByZero", "inverse of zero at precision");
    int P = prec_ == kInf ? kInf : prec_ - 2 * v_;
    return PadicElement(K_, -v_, K_->raw_unit_inv(u_), P);
}

PadicElement PadicElement::operator/(const PadicElement& o) const
{
    return *this * o.inv();
}

PadicElement PadicElement::pow(long long n) const
{
    if (n < 0) return inv().pow(-n);
    if (n == 0) return one(K_);
    if (is_zero()) return n == 1 ? *this : zero_at(K_, prec_ == kInf ? kInf : static_cast<int>(std::min<long long>(kInf - 1, prec_ * n)));
    Raw r = K_->raw_one(), b = u_;
    long long k = n;
    while (k) {
        if (k & 1) r = K_->raw_mul(r, b);
        k >>= 1;
        if (k) b = K_->raw_mul(b, b);
    }
    long long v = static_cast<long long>(v_) * n;
    int P = prec_ == kInf ? kInf : static_cast<int>(v + (prec_ - v_));
    return PadicElement(K_, static_cast<int>(v), std::move(r), P);
}

PadicElement PadicElement::mul_int(const mpz_class& n) const
{
    return *this * from_mpz(K_, n);
}

PadicElement PadicElement::mul_pi(int m) const
{
    if (is_zero()) return zero_at(K_, sat_add(prec_, m));
    return PadicElement(K_, v_ + m, u_, sat_add(prec_, m));
}

mpz_class PadicElement::to_mpz() const
{
    return K_->Z.to_mpz(raw()[0]);
}

mpz_class PadicElement::to_signed() const
{
    return K_->Z.to_signed(raw()[0]);
}

std::string PadicElement::str() const
{
    if (is_zero()) return "0";
    std::ostringstream os;
    if (K_->e == 1 && K_->f == 1) {
        PadicElement u(K_, 0, u_);
        if (v_ >= 0) {
            os << to_signed().get_str();
        } else {
            os << u.to_signed().get_str() << "/" << K_->p << "^" << -v_;
        }
        return os.str();
    }
    os << "pi^" << v_ << "*[";
    for (size_t i = 0; i < u_.size(); ++i) {
        if (i) os << ",";
        os << K_->Z.to_signed(u_[i]).get_str();
    }
    os << "]";
    return os.str();
}

PadicElement embed(const PadicElement& x, const PadicField& K)
{
    if (x.is_zero()) return PadicElement(K);
    const PadicField& K0 = x.field();
    if (K0->e != 1 || K0->f != 1) throw Error("FieldMismatch", "embedding requires a Q_p element");
    // x = pi0^v u with pi0 = p * w0.
    Raw u = K0->raw_mul(x.unit(), K0->w_power(x.ival()));
    PadicElement r = PadicElement::from_mpz(K, K0->Z.to_signed(u[0]));
    PadicElement P = PadicElement::from_int(K, static_cast<long long>(K0->p));
    return r * P.pow(x.ival());
}

PadicElement teichmuller_root(const PadicField& K, int d)
{
    if (d < 1) throw Error("NoRoot", "order must be positive");
    mpz_class qm1 = K->res.size() - 1;
    if (!mpz_divisible_ui_p(qm1.get_mpz_t(), static_cast<unsigned long>(d)))
        throw Error("NoRoot", "d does not divide p^f - 1");
    const ResidueField& R = K->res;
    ResidueField::Elt a;
    if (qm1 < 1000000) {
        u64 n = qm1.get_ui() + 1;
        for (u64 i = 1; i < n; ++i) {
            ResidueField::Elt c = R.element(i);
            if (R.order(c) == d) { a = c; break; }
        }
    } else {
        a = R.pow(R.gen(), qm1 / d);
    }
    return PadicElement::teichmuller(K, a);
}

PadicElement poly_eval(const std::vector<PadicElement>& poly, const PadicElement& x)
{
    PadicElement r(x.field());
    for (size_t i = poly.size(); i-- > 0;) r = r * x + poly[i];
    return r;
}

PadicElement hensel_lift(const std::vector<PadicElement>& poly, const PadicElement& approx)
{
    const PadicField& K = approx.field();
    std::vector<PadicElement> der;
    for (size_t i = 1; i < poly.size(); ++i) der.push_back(poly[i].mul_int(mpz_class(static_cast<unsigned long>(i))));
    PadicElement x = approx;
    PadicElement fx = poly_eval(poly, x);
    if (fx.is_zero()) return x;
    PadicElement dx = poly_eval(der, x);
    if (dx.is_zero() || !(fx.ival() > 2 * dx.ival()))
        throw Error("NotContracting", "|P(a)| < |P'(a)|^2 fails at precision");
    for (int it = 0; it < 64; ++it) {
        PadicElement step = fx / dx;
        x = x - step;
        fx = poly_eval(poly, x);
        if (fx.is_zero()) break;
        if (static_cast<long long>(step.ival()) >= K->cap() + std::max(0, x.ival())) break;
        dx = poly_eval(der, x);
        if (dx.is_zero()) throw Error("NotContracting", "derivative vanished during iteration");
    }
    return x;
}

std::vector<Segment> newton_polygon(const std::vector<std::optional<Rational>>& vals)
{
    std::vector<std::pair<long long, Rational>> pts;
    for (size_t i = 0; i < vals.size(); ++i)
        if (vals[i]) pts.emplace_back(static_cast<long long>(i), *vals[i]);
    if (pts.empty()) throw Error("Empty", "all coefficients are zero at precision");
    std::vector<std::pair<long long, Rational>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            // Remove b when it lies on or above segment a-pt.
            Rational lhs = (b.second - a.second) * Rational(pt.first - a.first);
            Rational rhs = (pt.second - a.second) * Rational(b.first - a.first);
            if (lhs >= rhs) hull.pop_back();
            else break;
        }
        hull.push_back(pt);
    }
    std::vector<Segment> segs;
    for (size_t i = 1; i < hull.size(); ++i) {
        long long len = hull[i].first - hull[i - 1].first;
        segs.push_back({(hull[i].second - hull[i - 1].second) / Rational(len), static_cast<int>(len)});
    }
    return segs;
}

std::string rational_str(const Rational& r)
{
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << "/" << r.denominator();
    return os.str();
}

} // namespace soliton
