#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

namespace soliton {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Lazy sum of products of residues below 2^126.
struct Acc {
    u64 w[5] = {0, 0, 0, 0, 0};
    void add_mul(u128 a, u128 b);
    void add(u128 a);
    void clear() { w[0] = w[1] = w[2] = w[3] = w[4] = 0; }
};

// The ring Z/p^N with p^N < 2^126.
class Zmod {
public:
    Zmod() = default;
    Zmod(u64 p, int N);

    u64 p() const { return p_; }
    int N() const { return N_; }
    u128 modulus() const { return m_; }

    u128 add(u128 a, u128 b) const { u128 s = a + b; return s >= m_ ? s - m_ : s; }
    u128 sub(u128 a, u128 b) const { return a >= b ? a - b : a + (m_ - b); }
    u128 neg(u128 a) const { return a ? m_ - a : 0; }
    u128 mul(u128 a, u128 b) const;
    u128 reduce(const Acc& acc) const;
    u128 pow(u128 a, const mpz_class& e) const;
    u128 inv(u128 unit) const;

    u128 from_mpz(const mpz_class& x) const;
    u128 from_int(long long x) const;
    mpz_class to_mpz(u128 a) const;
    // Symmetric representative in (-m/2, m/2].
    mpz_class to_signed(u128 a) const;

    int val(u128 a) const;              // p-adic valuation, N for zero
    u128 ppow(int k) const { return k >= N_ ? 0 : ppow_[k]; }
    u128 div_p(u128 a, int k) const;    // a / p^k for a divisible by p^k, top digits become 0
    bool is_unit(u128 a) const { return a % p_ != 0; }

private:
    u64 p_ = 0;
    int N_ = 0;
    u128 m_ = 0;
    u64 mlimb_[2] = {0, 0};
    int mn_ = 0;
    std::vector<u128> ppow_;
};

mpz_class u128_to_mpz(u128 a);
u128 mpz_to_u128(const mpz_class& x); // x must be in [0, 2^128)

} // namespace soliton
