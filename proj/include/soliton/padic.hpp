#pragma once

#include <climits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>
#include <gmpxx.h>

#include "soliton/zmod.hpp"

namespace soliton {

using Rational = boost::rational<long long>;
using Raw = std::vector<u128>;

// F_{p^f} = F_p[z]/(m(z)); elements are coefficient vectors of length f.
class ResidueField {
public:
    using Elt = std::vector<u64>;

    ResidueField() = default;
    ResidueField(u64 p, std::vector<u64> modulus);

    u64 p() const { return p_; }
    int f() const { return f_; }
    const std::vector<u64>& modulus() const { return mod_; }
    mpz_class size() const;

    Elt zero() const { return Elt(f_, 0); }
    Elt one() const;
    Elt from_int(long long x) const;
    Elt gen() const; // the class of z
    bool is_zero(const Elt& a) const;
    bool is_one(const Elt& a) const;

    Elt add(const Elt& a, const Elt& b) const;
    Elt sub(const Elt& a, const Elt& b) const;
    Elt neg(const Elt& a) const;
    Elt mul(const Elt& a, const Elt& b) const;
    Elt scale(const Elt& a, u64 c) const;
    Elt pow(const Elt& a, const mpz_class& e) const;
    Elt inv(const Elt& a) const;
    Elt frob(const Elt& a) const { return pow(a, mpz_class(static_cast<unsigned long>(p_))); }

    // Elements enumerated by base-p digits of i.
    Elt element(u64 i) const;
    u64 index(const Elt& a) const;
    // Multiplicative order of a nonzero element.
    mpz_class order(const Elt& a) const;

private:
    u64 p_ = 0;
    int f_ = 0;
    std::vector<u64> mod_; // monic, size f+1
};

// Polynomials over F_p, ascending coefficients.
namespace fp {
using Poly = std::vector<u64>;
void trim(Poly& a);
Poly mulmod(const Poly& a, const Poly& b, const Poly& m, u64 p);
Poly powmod(const Poly& a, const mpz_class& e, const Poly& m, u64 p);
Poly gcd(Poly a, Poly b, u64 p);
Poly sub(const Poly& a, const Poly& b, u64 p);
Poly rem(Poly a, const Poly& m, u64 p);
bool irreducible(const Poly& m, u64 p);
u64 inv(u64 a, u64 p);
} // namespace fp

struct FieldData {
    u64 p = 0;
    int f = 1;
    int e = 1;
    int N = 1;
    Zmod Z;
    ResidueField res;
    std::vector<u128> unram;            // monic modulus of O_F over Z_p, size f+1
    std::vector<std::vector<u128>> eis; // Eisenstein coefficients, size e+1, each of size f
    std::vector<mpz_class> eis_input;   // flattened exact input (for reports)

    std::vector<Raw> top;   // pi^{e+k} reduced, k = 0..e-2
    std::vector<Raw> pw;    // pi^m / p^{floor(m/e)}, m < e*N
    std::vector<Raw> wpow;  // w^s, w = pi^e / p, s < N
    std::vector<Raw> wipow; // w^{-s}, s < N
    Raw q;                  // p / pi

    int dim() const { return e * f; }
    int cap() const { return e * N; }

    // O_F arithmetic on vectors of length f.
    Raw fmul(const Raw& a, const Raw& b) const;
    Raw finv(const Raw& a) const;

    Raw raw_zero() const { return Raw(dim(), 0); }
    Raw raw_one() const;
    Raw raw_add(const Raw& a, const Raw& b) const;
    Raw raw_sub(const Raw& a, const Raw& b) const;
    Raw raw_neg(const Raw& a) const;
    Raw raw_scale(const Raw& a, u128 c) const;
    Raw raw_mul(const Raw& a, const Raw& b) const;
    Raw raw_mul_pi(const Raw& a) const;
    Raw raw_div_pi(const Raw& a) const;     // a must lie in pi*O_K
    Raw raw_div_p(const Raw& a, int s) const; // a must lie in p^s*O_K
    Raw raw_shift(const Raw& a, int m) const; // a * pi^m, m >= 0
    Raw raw_unit_inv(const Raw& a) const;
    Raw w_power(long long s) const;         // (pi^e/p)^s
    int raw_val(const Raw& a) const;        // pi-adic valuation, cap() for zero
    bool raw_is_zero(const Raw& a) const;
    ResidueField::Elt raw_residue(const Raw& a) const;
    Raw raw_from_residue(const ResidueField::Elt& a) const;

    // Reduces a product accumulator grid of length (2e-1)*(2f-1), row major by pi-degree.
    Raw reduce_grid(std::vector<Acc>& grid) const;
};

using PadicField = std::shared_ptr<const FieldData>;

// eis[j] is the coefficient of X^j, given as f integers (coordinates in zeta^i); empty means unramified.
PadicField make_field(u64 p, int f, const std::vector<std::vector<mpz_class>>& eis, int N);
// Convenience for f = 1: eis coefficients are integers.
PadicField make_field(u64 p, int f, const std::vector<mpz_class>& eis, int N);
PadicField make_qp(u64 p, int N);

bool same_field(const PadicField& a, const PadicField& b);

class PadicElement {
public:
    static constexpr int kInf = INT_MAX;

    PadicElement() = default;
    explicit PadicElement(PadicField K) : K_(std::move(K)) {}
    // pi^v * unit known modulo pi^prec (prec is clamped to v + e*N).
    PadicElement(PadicField K, int v, Raw unit, int prec = kInf);

    static PadicElement zero(const PadicField& K) { return PadicElement(K); }
    static PadicElement zero_at(const PadicField& K, int prec);
    static PadicElement one(const PadicField& K) { return from_int(K, 1); }
    static PadicElement from_int(const PadicField& K, long long x);
    static PadicElement from_mpz(const PadicField& K, const mpz_class& x);
    static PadicElement from_mpq(const PadicField& K, const mpq_class& x);
    // Element pi^shift * c for integral raw coordinates c.
    static PadicElement from_raw(const PadicField& K, Raw c, int shift = 0, int prec = kInf);
    static PadicElement uniformizer(const PadicField& K);
    static PadicElement zeta(const PadicField& K);
    static PadicElement teichmuller(const PadicField& K, const ResidueField::Elt& a);

    const PadicField& field() const { return K_; }
    bool is_zero() const { return v_ == kInf; }   // zero at precision
    int prec() const { return prec_; }             // absolute precision in units of 1/e
    int ival() const { return v_; }          // valuation in units of 1/e
    Rational val() const;                     // requires nonzero
    const Raw& unit() const { return u_; }
    Raw raw() const;                          // coordinates, requires ival >= 0
    ResidueField::Elt residue() const;        // requires ival >= 0
    bool is_integral() const { return v_ >= 0; }
    bool is_unit() const { return v_ == 0; }

    PadicElement operator-() const;
    PadicElement operator+(const PadicElement& o) const;
    PadicElement operator-(const PadicElement& o) const;
    PadicElement operator*(const PadicElement& o) const;
    PadicElement operator/(const PadicElement& o) const;
    PadicElement& operator+=(const PadicElement& o) { return *this = *this + o; }
    PadicElement& operator-=(const PadicElement& o) { return *this = *this - o; }
    PadicElement& operator*=(const PadicElement& o) { return *this = *this * o; }
    PadicElement inv() const;
    PadicElement pow(long long n) const;
    PadicElement mul_int(const mpz_class& n) const;
    PadicElement mul_pi(int m) const;          // times pi^m, any sign
    bool equals(const PadicElement& o) const { return (*this - o).is_zero(); }

    // Z_p integer for elements of Q_p with ival >= 0 (f = e = 1 fields only use coordinate 0).
    mpz_class to_mpz() const;
    mpz_class to_signed() const;
    std::string str() const;

private:
    PadicField K_;
    int v_ = kInf;
    Raw u_;
    int prec_ = kInf;
};

// Maps an element of Q_p (f = e = 1) into K.
PadicElement embed(const PadicElement& x, const PadicField& K);

PadicElement teichmuller_root(const PadicField& K, int d);

// poly[i] is the coefficient of X^i.
PadicElement poly_eval(const std::vector<PadicElement>& poly, const PadicElement& x);
PadicElement hensel_lift(const std::vector<PadicElement>& poly, const PadicElement& approx);

struct Segment {
    Rational slope;
    int length;
    bool operator==(const Segment& o) const { return slope == o.slope && length == o.length; }
};

// vals[i] is the valuation of the degree-i coefficient, nullopt for zero.
std::vector<Segment> newton_polygon(const std::vector<std::optional<Rational>>& vals);

std::string rational_str(const Rational& r);

} // namespace soliton
