#include "soliton/zmod.hpp"

#include "soliton/error.hpp"

#include <gmp.h>

namespace soliton {

namespace {

inline void add_at(u64* w, int i, u128 x)
{
    u64 lo = static_cast<u64>(x);
    u64 hi = static_cast<u64>(x >> 64);
    unsigned char c = __builtin_add_overflow(w[i], lo, &w[i]);
    u64 h = hi + c; // hi < 2^64 - 1 for products of values below 2^126
    c = __builtin_add_overflow(w[i + 1], h, &w[i + 1]);
    for (int k = i + 2; c && k < 5; ++k)
        c = __builtin_add_overflow(w[k], u64(1), &w[k]);
}

} // namespace

void Acc::add_mul(u128 a, u128 b)
{
    u64 a0 = static_cast<u64>(a), a1 = static_cast<u64>(a >> 64);
    u64 b0 = static_cast<u64>(b), b1 = static_cast<u64>(b >> 64);
    add_at(w, 0, static_cast<u128>(a0) * b0);
    if (b1) add_at(w, 1, static_cast<u128>(a0) * b1);
    if (a1) {
        add_at(w, 1, static_cast<u128>(a1) * b0);
        if (b1) add_at(w, 2, static_cast<u128>(a1) * b1);
    }
}

void Acc::add(u128 a)
{
    add_at(w, 0, a);
}

mpz_class u128_to_mpz(u128 a)
{
    mpz_class r = static_cast<unsigned long>(static_cast<u64>(a >> 64));
    r <<= 64;
    r += mpz_class(static_cast<unsigned long>(static_cast<u64>(a)));
    return r;
}

u128 mpz_to_u128(const mpz_class& x)
{
    mpz_class hi = x >> 64;
    mpz_class lo = x - (hi << 64);
    return (static_cast<u128>(hi.get_ui()) << 64) | static_cast<u128>(lo.get_ui());
}

Zmod::Zmod(u64 p, int N) : p_(p), N_(N)
{
    if (p < 2 || N < 1) throw Error("PrecisionOverflow", "need p >= 2 and N >= 1");
    mpz_class m = 1;
    for (int i = 0; i < N; ++i) m *= static_cast<unsigned long>(p);
    if (mpz_sizeinbase(m.get_mpz_t(), 2) > 126)
        throw Error("PrecisionOverflow", "p^N must stay below 2^126");
    m_ = mpz_to_u128(m);
    mlimb_[0] = static_cast<u64>(m_);
    mlimb_[1] = static_cast<u64>(m_ >> 64);
    mn_ = mlimb_[1] ? 2 : 1;
    ppow_.resize(N);
    u128 q = 1;
    for (int i = 0; i < N; ++i) { ppow_[i] = q; q *= p; }
}

u128 Zmod::reduce(const Acc& acc) const
{
    int n = 5;
    while (n > 0 && acc.w[n - 1] == 0) --n;
    if (n == 0) return 0;
    if (n <= 2) return ((static_cast<u128>(acc.w[1]) << 64) | acc.w[0]) % m_;
    mp_limb_t q[5], r[2] = {0, 0};
    mpn_tdiv_qr(q, r, 0, reinterpret_cast<const mp_limb_t*>(acc.w), n,
                reinterpret_cast<const mp_limb_t*>(mlimb_), mn_);
    return (static_cast<u128>(mn_ > 1 ? r[1] : 0) << 64) | r[0];
}

u128 Zmod::mul(u128 a, u128 b) const
{
    if ((a >> 63) == 0 && (b >> 63) == 0) {
        u128 pr = a * b;
        return pr % m_;
    }
    Acc acc;
    acc.add_mul(a, b);
    return reduce(acc);
}

u128 Zmod::pow(u128 a, const mpz_class& e) const
{
    u128 r = 1 % m_;
    u128 b = a;
    size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    if (e == 0) return r;
    for (size_t i = 0; i < bits; ++i) {
        if (mpz_tstbit(e.get_mpz_t(), i)) r = mul(r, b);
        b = mul(b, b);
    }
    return r;
}

u128 Zmod::inv(u128 unit) const
{
    if (unit % p_ == 0) throw Error("NotUnit", "inverse of a non-unit residue");
    mpz_class x = u128_to_mpz(unit), m = u128_to_mpz(m_), r;
    mpz_invert(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
    return mpz_to_u128(r);
}

u128 Zmod::from_mpz(const mpz_class& x) const
{
    mpz_class m = u128_to_mpz(m_), r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
    return mpz_to_u128(r);
}

u128 Zmod::from_int(long long x) const
{
    if (x >= 0) return static_cast<u128>(x) % m_;
    u128 v = static_cast<u128>(-(x + 1)) + 1;
    v %= m_;
    return neg(v);
}

mpz_class Zmod::to_mpz(u128 a) const
{
    return u128_to_mpz(a);
}

mpz_class Zmod::to_signed(u128 a) const
{
    mpz_class r = u128_to_mpz(a);
    if (a > m_ / 2) r -= u128_to_mpz(m_);
    return r;
}

int Zmod::val(u128 a) const
{
    if (a == 0) return N_;
    int v = 0;
    while (a % p_ == 0) { a /= p_; ++v; }
    return v;
}

u128 Zmod::div_p(u128 a, int k) const
{
    if (k <= 0) return a;
    if (k >= N_) return 0;
    return a / ppow_[k];
}

} // namespace soliton
