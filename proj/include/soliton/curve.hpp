#pragma once

#include <optional>
#include <string>
#include <vector>

#include "soliton/grassmann.hpp"

namespace soliton {

using Matrix = std::vector<std::vector<PadicElement>>;
using ResidueMatrix = std::vector<std::vector<ResidueField::Elt>>;

// Monic integer polynomial (constant term first) raised to a multiplicity in y^d = prod f_k(x)^{a_k}.
struct BranchFactor {
    std::vector<mpz_class> poly;
    int mult = 1;
    int degree() const { return static_cast<int>(poly.size()) - 1; }
};

struct AffinePoint {
    PadicElement x0, y0;
};

struct CurveModel {
    PadicField K;
    int d = 2;
    std::vector<BranchFactor> branch;
    std::optional<AffinePoint> base; // nullopt: the unique point over x = infinity
    int genus = 0;
    int S = 0;               // sum of mult * degree
    int B = 0;               // number of finite branch points
    int alpha = 0, beta = 0; // alpha*S - beta*d = 1; the local parameter at infinity is y^alpha / x^beta
    std::optional<int> automorphism_order;
    std::string family = "superelliptic";
};

CurveModel superelliptic(const PadicField& K, int d, std::vector<BranchFactor> branch);
CurveModel fermat_quotient(const PadicField& K, int d, int a);           // y^d = x^a (x-1)^{d+1-a}
CurveModel hyperelliptic_x5x(const PadicField& K, int g);                // y^2 = x^{2g+1} + x
CurveModel power_plus_one(const PadicField& K, int l);                   // y^l = x^{l+1} + 1
CurveModel even_quadratic(const PadicField& K, int l, int a, int b);     // y^l = x^{2a} (x^2+1)^b
CurveModel with_affine_base(CurveModel C, const PadicElement& x0, const PadicElement& y0);

// The hyperelliptic right-hand side prod f_k^{a_k} as an integer polynomial.
std::vector<mpz_class> branch_product(const CurveModel& C);

struct Expansion {
    LaurentSeries x, y;
};

// x(T), y(T) with coefficients known down to degree -depth.
Expansion expand_at_basepoint(const CurveModel& C, int depth);
LaurentSeries curve_residual(const CurveModel& C, const Expansion& E);

struct GapData {
    std::vector<int> gaps; // increasing, equals mu
};

// Divisor supported on branch points and infinity: mult n at factor k means n times every zero of f_k.
struct Divisor {
    std::vector<std::pair<int, int>> at_branch;
    int at_infinity = 0;
    int degree(const CurveModel& C) const;
};

struct AffineRing {
    GrassPoint A;
    GapData gd;
    GapData residue_gd; // gap data of the special fiber from the same construction over the residue field
};

// Standard basis up to degree cap, every element known down to degree -depth.
AffineRing affine_ring(const CurveModel& C, int cap, int depth = 8);
GrassPoint krichever_subspace(const CurveModel& C, const Divisor& D, int cap, int depth = 8);
// Pole orders of the generators of the twisted module, from the closed form.
std::vector<int> generator_degrees(const CurveModel& C, const Divisor& D, int cap);

struct HermiteBasis {
    std::vector<int> mu;
    Matrix c; // c[i][n] for 0 <= n <= cap
    Matrix normalizer; // inverse of the leading block of the standard differentials
};

// Expansions of the standard regular differentials, normalized at the gap exponents.
HermiteBasis hermite_basis(const CurveModel& C, int cap);
// Column n of the Hermite matrix through a residue formula in 1/x, exact over Q (points at infinity only).
std::vector<PadicElement> hermite_column(const CurveModel& C, const HermiteBasis& H, long long n);
// The same column modulo p, valid for arbitrarily large n.
std::vector<u64> hermite_column_mod_p(const CurveModel& C, long long n);

struct StohrViana {
    int m = 1;
    Matrix e;                     // g x g
    std::vector<LaurentSeries> a; // A-part of b_j
    std::vector<LaurentSeries> t; // tail part of b_j, degrees <= -1
};

StohrViana stohr_viana_matrix(const GrassPoint& A, const GapData& gd, int m);

// e^{(k)} modulo p, via the residue formula at infinity or direct series at an affine point.
std::vector<std::vector<u64>> frobenius_matrix_mod_p(const CurveModel& C, int k);

struct HasseWitt {
    std::vector<std::vector<u64>> matrix;
    bool ordinary = false;
};

HasseWitt hasse_witt(const CurveModel& C);

std::vector<std::vector<u64>> matmul_mod(const std::vector<std::vector<u64>>& a,
                                         const std::vector<std::vector<u64>>& b, u64 p);
u64 det_mod(std::vector<std::vector<u64>> a, u64 p);

Matrix identity_matrix(const PadicField& K, int n);
Matrix matrix_inverse(const Matrix& M);

} // namespace soliton
