#pragma once

#include <optional>
#include <string>
#include <vector>

#include "soliton/curve.hpp"

namespace soliton {

// T^{mu_j p^k} = a_j + t_j + sum_i e_ij T^{mu_i} with a_j in A and t_j of degree <= -1.
struct FrobeniusDecomposition {
    int k = 0;
    Matrix e;
    std::vector<LaurentSeries> a;
    std::vector<LaurentSeries> t;
};

std::vector<FrobeniusDecomposition> decompose_frobenius(const GrassPoint& A, const GapData& gd, int kmax);

// e^{(k)} for 0 <= k <= kmax through the Hermite columns at p^k mu_j (no cap needed).
std::vector<Matrix> frobenius_matrices(const CurveModel& C, int kmax);

// l(X) = sum_k e^{(k)} X^{p^k} / p^k with coefficients in Q_p.
struct FormalLog {
    u64 p = 0;
    std::vector<Matrix> e;
    int genus() const { return e.empty() ? 0 : static_cast<int>(e[0].size()); }
    int kmax() const { return static_cast<int>(e.size()) - 1; }
    bool diagonal() const;
    PadicElement coefficient(int i, int j, int k) const; // e_ij^{(k)} / p^k
};

FormalLog formal_log(const std::vector<FrobeniusDecomposition>& d);
FormalLog formal_log(std::vector<Matrix> e);

// Smallest K with p^k t - k >= N for all k > K, where t bounds the valuation of the argument.
int log_terms_needed(u64 p, const Rational& t, int N);

// The formal logarithm with coefficients embedded into an extension.
class LogEvaluator {
public:
    LogEvaluator(const FormalLog& L, const PadicField& K, int kmax);
    const PadicField& field() const { return K_; }
    int kmax() const { return kmax_; }
    std::vector<PadicElement> eval(const std::vector<PadicElement>& X) const;
    PadicElement eval_diag(int i, const PadicElement& x) const;
    PadicElement deriv_diag(int i, const PadicElement& x) const;
    // Jacobian of (1/w) l(w U) at U.
    Matrix scaled_jacobian(const PadicElement& w, const std::vector<PadicElement>& U) const;

private:
    PadicField K_;
    u64 p_;
    int kmax_;
    std::vector<std::vector<std::vector<PadicElement>>> c_; // c_[k][i][j] = e_ij^{(k)} / p^k
    std::vector<std::vector<std::vector<PadicElement>>> e_;
};

// Coefficients of exp(sum_k T^{p^k}/p^k).
std::vector<mpq_class> artin_hasse_coefficients(u64 p, int cap);

// h_0 = 1 and |h_i| <= p^{-i rho_val}; rho_val is nullopt for the constant loop.
struct LoopElement {
    PadicField K;
    std::vector<PadicElement> h;
    std::optional<Rational> rho_val;
    std::vector<int> mu;
    std::vector<PadicElement> pi;
    int cap() const { return static_cast<int>(h.size()) - 1; }
};

LoopElement artin_hasse_loop(const PadicElement& pi, int cap);
LoopElement artin_hasse_loop(const std::vector<PadicElement>& pi, const std::vector<int>& mu, int cap);

// Field extension bookkeeping for reports.
struct Extension {
    u64 p = 0;
    int f = 1;
    std::vector<mpz_class> eisenstein; // constant term first, empty when unramified
    std::string note;
};

struct CyclicTorsion {
    PadicField K;
    Extension ext;
    int component = 0;
    int n = 1;
    mpz_class varpi0; // Lubin-Tate parameter modulo p^{n+1}
    std::vector<mpz_class> honda; // c_1..c_n
    std::vector<PadicElement> roots; // 0 first, then by decreasing valuation
    std::vector<Segment> segments;   // Newton polygon of l_i truncated at degree p^n
    int evaluations = 0;
};

// Lubin-Tate field of level n attached to l_i: Eisenstein polynomial and parameter.
Extension lubin_tate_extension(const FormalLog& L, int component, int n, int N, mpz_class* varpi0 = nullptr,
                               std::vector<mpz_class>* honda = nullptr);

CyclicTorsion solve_torsion_cyclic(const FormalLog& L, int component, int n, int N);

struct FullTorsion {
    PadicField K;
    Extension ext;
    std::vector<std::vector<PadicElement>> points; // zero vector first
    std::vector<std::vector<ResidueField::Elt>> residues; // u with pi = varpi * lift(u)
};

FullTorsion solve_torsion_full(const FormalLog& L, int N, int fmax = 12);

// Minimal unramified degree f for which u + e u^(p) = 0 has p^g solutions over F_{p^f}.
int required_unramified_degree(const std::vector<std::vector<u64>>& ebar, u64 p, int fmax);

// Window data for the p^n-torsion check, shared by all points with the same support.
struct PnWindow {
    u64 p = 0;
    int n = 1;
    int depth = 6;             // window lower end is -depth
    int precision = 3;         // neglect terms of valuation >= precision
    std::vector<int> support;  // indices j with pi_j allowed nonzero
    int kdec = 0;              // decompositions used for 0 <= k <= kdec
    int mmax = 1;              // exp truncated after Y^mmax / mmax!
    int top = 0;
    bool reconstruction_ok = false;
    bool products_in_A = false;
    bool tails_integral = false;
    int products_checked = 0;
    std::vector<int> mu;
    std::vector<FrobeniusDecomposition> dec;
};

struct PnShape {
    int kdec = 0;
    int mmax = 1;
};

// Frobenius levels and exponential terms that matter above the window precision.
PnShape pn_window_shape(u64 p, int n, int precision);

PnWindow prepare_pn_window(const GrassPoint& A, const GapData& gd, u64 p, int n, std::vector<int> support,
                           int depth = 6, int precision = 3);

struct InequalityRow {
    int j = 0, k = 0;
    Rational value; // valuation of p^n pi_j^{p^k} / p^k
    Rational bound; // n - 1 - k + p^k/(p^n - p^{n-1})
    bool strict = false;
    bool at_radius = false; // bound equals 1/(p-1)
};

struct PnTorsionEvidence {
    int n = 1;
    bool trivial = false;
    bool residual_zero = false;
    std::vector<InequalityRow> rows;
    bool inequalities_ok = false;
    bool window_ok = false;
    std::optional<Rational> neglected_val;
    std::vector<std::optional<Rational>> truncated_log_vals;
    bool alpha_in_A = false;
    bool tail_in_gamma0 = false;
    bool ok() const;
};

PnTorsionEvidence verify_pn_torsion(const PnWindow& W, const FormalLog& L, const LoopElement& h);

struct TauValue {
    PadicElement value;
    std::optional<Rational> truncation_val; // nullopt when exact
    int weight_cap = 0;
    int terms = 0;
    bool inconclusive = false;
};

TauValue tau_sato(const GrassPoint& V, const LoopElement& h, int weight_cap);

enum class Verdict { OutsideThetaCertified, InTheta, Inconclusive };
std::string verdict_name(Verdict v);

struct ThetaEvidence {
    Partition kappa;
    int index = 0;
    std::string precondition; // "single", "gap-vector" or "trivial"
    std::optional<Rational> rho_val;
    std::optional<Rational> s_kappa_val;
    bool s_kappa_exact = false;
    std::optional<Rational> tau_val;
    // Finite block of the map W -> H / T^{-i} K[[tt]] after multiplication by h.
    int window_rows = 0;
    std::optional<Rational> window_det_val;
    std::optional<Rational> window_error_val;
    int window_tail_dim = -1; // 0 when the block is certified injective
    Verdict verdict = Verdict::Inconclusive;
};

// weight_cap 0 means |kappa| + 4.
ThetaEvidence theta_membership(const GrassPoint& V, const LoopElement& h, int window_rows = 8, int weight_cap = 0);

struct TorsionCertificate {
    int level = 1;
    std::string component; // component index or "full"
    std::vector<PadicElement> pi;
    std::vector<int> mu;
    std::optional<Rational> norm_val; // -log_p ||pi||
    Rational norm_bound;
    bool valuation_ok = false;
    bool residual_zero = false;
    std::optional<Rational> residual_val;
    ThetaEvidence theta;
};

TorsionCertificate certify_torsion_point(const GrassPoint& V, const FormalLog& L, const std::vector<PadicElement>& pi,
                                         const std::vector<int>& mu, int level, const std::string& component,
                                         int window_rows = 8, int weight_cap = 0);

// h = sum c_i z_i over the standard basis, required to satisfy |c_i| <= |pi|^{s_i}.
LaurentSeries closure_element(const GrassPoint& A, const std::vector<PadicElement>& c, const PadicElement& pi);

// Reductions of h_n / pi^n at the given exponents.
std::vector<ResidueField::Elt> gamma_a_filtration_probe(const LaurentSeries& h, const PadicElement& pi,
                                                        const std::vector<int>& exponents);

// Genus-2 curve y^2 = F(x) with a non-Weierstrass affine base point and ordinary reduction.
struct NonWeierstrassInstance {
    u64 p = 0;
    std::vector<mpz_class> F; // monic quintic, constant term first
    long long x0 = 0;
    PadicElement y0;
    int f = 1;
    CurveModel C;
};

std::optional<NonWeierstrassInstance> find_nonweierstrass_instance(u64 p, int N, int bound);

} // namespace soliton
