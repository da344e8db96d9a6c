#include "soliton/soliton.hpp"

#include <algorithm>
#include <map>

#include "soliton/error.hpp"

namespace soliton {

namespace {

mpz_class ipow(u64 p, int k)
{
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, static_cast<unsigned long>(k));
    return r;
}

long long lpow(u64 p, int k)
{
    long long r = 1;
    for (int i = 0; i < k; ++i) r *= static_cast<long long>(p);
    return r;
}

Rational vq(const PadicElement& x)
{
    return Rational(x.ival(), x.field()->e);
}

Rational prec_q(const PadicElement& x)
{
    return Rational(x.prec() == PadicElement::kInf ? x.field()->cap() : x.prec(), x.field()->e);
}

PadicElement lift_to(const PadicElement& x, const PadicField& K)
{
    if (same_field(x.field(), K)) return x;
    return embed(x, K);
}

void require_strict(const GrassPoint& V)
{
    if (V.integrality != Integrality::Strict || !V.theorem_backed)
        throw Error("NotStrictlyIntegral", "point is not strictly integral with matching residue gaps");
}

// Null space over F_p of an r x c matrix.
std::vector<std::vector<u64>> nullspace_mod(std::vector<std::vector<u64>> M, u64 p)
{
    int r = static_cast<int>(M.size()), c = r ? static_cast<int>(M[0].size()) : 0;
    std::vector<int> pivcol;
    int row = 0;
    for (int col = 0; col < c && row < r; ++col) {
        int sel = -1;
        for (int i = row; i < r; ++i)
            if (M[i][col] % p) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(M[sel], M[row]);
        u64 inv = fp::inv(M[row][col] % p, p);
        for (auto& x : M[row]) x = static_cast<u64>(static_cast<u128>(x) * inv % p);
        for (int i = 0; i < r; ++i) {
            if (i == row || M[i][col] == 0) continue;
            u64 f = M[i][col];
            for (int j = 0; j < c; ++j) M[i][j] = (M[i][j] + p - static_cast<u64>(static_cast<u128>(f) * M[row][j] % p)) % p;
        }
        pivcol.push_back(col);
        ++row;
    }
    std::vector<bool> is_piv(c, false);
    for (int pc : pivcol) is_piv[pc] = true;
    std::vector<std::vector<u64>> basis;
    for (int free = 0; free < c; ++free) {
        if (is_piv[free]) continue;
        std::vector<u64> v(c, 0);
        v[free] = 1;
        for (size_t i = 0; i < pivcol.size(); ++i) v[pivcol[i]] = (p - M[i][free] % p) % p;
        basis.push_back(v);
    }
    return basis;
}

// Matrix of u -> u + E Frob(u) on F_{p^f}^g in the F_p-coordinates of F.
std::vector<std::vector<u64>> artin_schreier_matrix(const std::vector<std::vector<u64>>& E, const ResidueField& F)
{
    int g = static_cast<int>(E.size()), f = F.f();
    u64 p = F.p();
    int dim = g * f;
    std::vector<std::vector<u64>> M(dim, std::vector<u64>(dim, 0));
    for (int j = 0; j < g; ++j)
        for (int t = 0; t < f; ++t) {
            ResidueField::Elt z = F.zero();
            z[t] = 1;
            ResidueField::Elt fz = F.frob(z);
            int col = j * f + t;
            for (int i = 0; i < g; ++i) {
                ResidueField::Elt img = F.scale(fz, E[i][j] % p);
                if (i == j) img = F.add(img, z);
                for (int s = 0; s < f; ++s) M[i * f + s][col] = img[s];
            }
        }
    return M;
}

std::vector<mpz_class> poly_mul_mod(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, const mpz_class& m)
{
    std::vector<mpz_class> r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0)
            for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    for (auto& x : r) {
        x %= m;
        if (x < 0) x += m;
    }
    return r;
}

} // namespace

// ---------------------------------------------------------------- decompositions and logarithms

std::vector<FrobeniusDecomposition> decompose_frobenius(const GrassPoint& A, const GapData& gd, int kmax)
{
    require_strict(A);
    const u64 p = A.K->p;
    int g = static_cast<int>(gd.gaps.size());
    if (g == 0) throw Error("CapTooSmall", "no gaps");
    if (A.cap < lpow(p, kmax) * gd.gaps.back())
        throw Error("CapTooSmall", "cap " + std::to_string(A.cap) + " below p^kmax * mu_g");
    std::vector<FrobeniusDecomposition> out;
    for (int k = 0; k <= kmax; ++k) {
        FrobeniusDecomposition D;
        D.k = k;
        if (k == 0) {
            D.e = identity_matrix(A.K, g);
            for (int j = 0; j < g; ++j) {
                D.a.push_back(LaurentSeries::zero(A.K, 0, true));
                D.t.push_back(LaurentSeries::zero(A.K, 0, true));
            }
        } else {
            auto sv = stohr_viana_matrix(A, gd, static_cast<int>(lpow(p, k)));
            D.e = sv.e;
            D.a = sv.a;
            D.t = sv.t;
        }
        out.push_back(std::move(D));
    }
    return out;
}

std::vector<Matrix> frobenius_matrices(const CurveModel& C, int kmax)
{
    HermiteBasis H = hermite_basis(C, 2 * C.genus + 2);
    int g = C.genus;
    const u64 p = C.K->p;
    std::vector<Matrix> out{identity_matrix(C.K, g)};
    for (int k = 1; k <= kmax; ++k) {
        Matrix e(g, std::vector<PadicElement>(g, PadicElement(C.K)));
        for (int j = 0; j < g; ++j) {
            auto col = hermite_column(C, H, lpow(p, k) * H.mu[j]);
            for (int i = 0; i < g; ++i) e[i][j] = col[i];
        }
        out.push_back(std::move(e));
    }
    return out;
}

bool FormalLog::diagonal() const
{
    for (const auto& m : e)
        for (size_t i = 0; i < m.size(); ++i)
            for (size_t j = 0; j < m.size(); ++j)
                if (i != j && !m[i][j].is_zero()) return false;
    return true;
}

PadicElement FormalLog::coefficient(int i, int j, int k) const
{
    const PadicField& K = e.at(k)[i][j].field();
    return e[k][i][j] * PadicElement::from_mpq(K, mpq_class(1, ipow(p, k)));
}

FormalLog formal_log(const std::vector<FrobeniusDecomposition>& d)
{
    std::vector<Matrix> e;
    for (const auto& x : d) e.push_back(x.e);
    return formal_log(std::move(e));
}

FormalLog formal_log(std::vector<Matrix> e)
{
    if (e.empty()) throw Error("CapTooSmall", "no Frobenius matrices");
    FormalLog L;
    L.p = e[0][0][0].field()->p;
    L.e = std::move(e);
    return L;
}

int log_terms_needed(u64 p, const Rational& t, int N)
{
    int last = 0;
    for (int k = 0; k < 64; ++k) {
        Rational v = Rational(lpow(p, std::min(k, 40))) * t - k;
        if (v < N) last = k;
        if (k > last + 2 && Rational(static_cast<long long>(p - 1)) * t * Rational(lpow(p, std::min(k, 40))) > 1) break;
    }
    return last;
}

LogEvaluator::LogEvaluator(const FormalLog& L, const PadicField& K, int kmax) : K_(K), p_(L.p), kmax_(kmax)
{
    if (kmax > L.kmax()) throw Error("CapTooSmall", "formal logarithm known only through k = " + std::to_string(L.kmax()));
    int g = L.genus();
    for (int k = 0; k <= kmax; ++k) {
        PadicElement inv = PadicElement::from_mpq(K, mpq_class(1, ipow(p_, k)));
        std::vector<std::vector<PadicElement>> ck(g, std::vector<PadicElement>(g, PadicElement(K)));
        std::vector<std::vector<PadicElement>> ek(g, std::vector<PadicElement>(g, PadicElement(K)));
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                if (L.e[k][i][j].is_zero()) continue;
                ek[i][j] = lift_to(L.e[k][i][j], K);
                ck[i][j] = ek[i][j] * inv;
            }
        c_.push_back(std::move(ck));
        e_.push_back(std::move(ek));
    }
}

std::vector<PadicElement> LogEvaluator::eval(const std::vector<PadicElement>& X) const
{
    int g = static_cast<int>(X.size());
    std::vector<PadicElement> out(g, PadicElement::zero_at(K_, K_->cap()));
    std::vector<PadicElement> pw = X;
    for (int k = 0; k <= kmax_; ++k) {
        if (k > 0)
            for (auto& x : pw)
                if (!x.is_zero()) x = x.pow(static_cast<long long>(p_));
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j)
                if (!c_[k][i][j].is_zero() && !pw[j].is_zero()) out[i] += c_[k][i][j] * pw[j];
    }
    return out;
}

PadicElement LogEvaluator::eval_diag(int i, const PadicElement& x) const
{
    PadicElement out = PadicElement::zero_at(K_, K_->cap());
    if (x.is_zero()) return out;
    PadicElement pw = x;
    for (int k = 0; k <= kmax_; ++k) {
        if (k > 0) pw = pw.pow(static_cast<long long>(p_));
        if (!c_[k][i][i].is_zero()) out += c_[k][i][i] * pw;
    }
    return out;
}

PadicElement LogEvaluator::deriv_diag(int i, const PadicElement& x) const
{
    PadicElement out = PadicElement::one(K_);
    if (x.is_zero() || kmax_ == 0) return out;
    PadicElement q1 = x.pow(static_cast<long long>(p_ - 1)), q = q1;
    for (int k = 1; k <= kmax_; ++k) {
        if (k > 1) q = q.pow(static_cast<long long>(p_)) * q1;
        if (!e_[k][i][i].is_zero()) out += e_[k][i][i] * q;
    }
    return out;
}

Matrix LogEvaluator::scaled_jacobian(const PadicElement& w, const std::vector<PadicElement>& U) const
{
    int g = static_cast<int>(U.size());
    Matrix J = identity_matrix(K_, g);
    std::vector<PadicElement> wu;
    for (const auto& u : U) wu.push_back(w * u);
    std::vector<PadicElement> q1, q;
    for (const auto& x : wu) q1.push_back(x.is_zero() ? x : x.pow(static_cast<long long>(p_ - 1)));
    q = q1;
    for (int k = 1; k <= kmax_; ++k) {
        if (k > 1)
            for (int j = 0; j < g; ++j)
                if (!q[j].is_zero()) q[j] = q[j].pow(static_cast<long long>(p_)) * q1[j];
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j)
                if (!e_[k][i][j].is_zero() && !q[j].is_zero()) J[i][j] += e_[k][i][j] * q[j];
    }
    return J;
}

// ---------------------------------------------------------------- Artin-Hasse loops

std::vector<mpq_class> artin_hasse_coefficients(u64 p, int cap)
{
    std::vector<mpq_class> a(cap + 1, 0);
    a[0] = 1;
    for (int n = 1; n <= cap; ++n) {
        mpq_class s = 0;
        for (long long q = 1; q <= n; q *= static_cast<long long>(p)) s += a[n - q];
        a[n] = s / n;
    }
    return a;
}

LoopElement artin_hasse_loop(const PadicElement& pi, int cap)
{
    return artin_hasse_loop(std::vector<PadicElement>{pi}, std::vector<int>{1}, cap);
}

LoopElement artin_hasse_loop(const std::vector<PadicElement>& pi, const std::vector<int>& mu, int cap)
{
    if (pi.empty() || pi.size() != mu.size()) throw Error("BadArgument", "pi and mu must have equal nonzero length");
    const PadicField& K = pi[0].field();
    LoopElement L;
    L.K = K;
    L.pi = pi;
    L.mu = mu;
    L.h.assign(cap + 1, PadicElement(K));
    L.h[0] = PadicElement::one(K);
    auto a = artin_hasse_coefficients(K->p, cap);
    for (size_t i = 0; i < pi.size(); ++i) {
        if (pi[i].is_zero()) continue;
        if (pi[i].ival() <= 0) throw Error("NotInMaximalIdeal", "|pi| must be < 1");
        Rational r = vq(pi[i]) / mu[i];
        if (!L.rho_val || r < *L.rho_val) L.rho_val = r;
        // Factor h(T^{mu_i}; pi_i), then multiply into the running product.
        std::vector<PadicElement> f(cap + 1, PadicElement(K));
        PadicElement pw = PadicElement::one(K);
        for (int m = 0; static_cast<long long>(m) * mu[i] <= cap; ++m) {
            f[m * mu[i]] = PadicElement::from_mpq(K, a[m]) * pw;
            pw *= pi[i];
        }
        std::vector<PadicElement> prod(cap + 1, PadicElement(K));
        for (int u = 0; u <= cap; ++u) {
            if (L.h[u].is_zero()) continue;
            for (int v = 0; u + v <= cap; v += mu[i])
                if (!f[v].is_zero()) prod[u + v] += L.h[u] * f[v];
        }
        L.h = std::move(prod);
    }
    return L;
}

// ---------------------------------------------------------------- torsion

Extension lubin_tate_extension(const FormalLog& L, int i, int n, int N, mpz_class* varpi0_out,
                               std::vector<mpz_class>* honda_out)
{
    const u64 p = L.p;
    if (n < 1) throw Error("BadArgument", "level must be positive");
    if (L.kmax() < n) throw Error("CapTooSmall", "formal logarithm too short for the level");
    mpz_class M = ipow(p, N + n + 2), P = static_cast<unsigned long>(p);
    std::vector<mpz_class> e(n + 1);
    for (int k = 0; k <= n; ++k) {
        const PadicElement& x = L.e[k][i][i];
        if (x.is_zero() || x.ival() != 0)
            throw Error("NonUnitCoefficient", "e_ii^(" + std::to_string(k) + ") is not a unit");
        e[k] = x.to_mpz();
    }
    // Honda type p - sum c_k F^k of the logarithm sum e^(k)/p^k X^{p^k}.
    std::vector<mpz_class> c(n + 1, 0);
    for (int k = 1; k <= n; ++k) {
        mpz_class s = e[k];
        for (int j = 1; j < k; ++j) s -= c[j] * ipow(p, j - 1) * e[k - j];
        mpz_class d = ipow(p, k - 1);
        s %= M;
        if (s < 0) s += M;
        if (s % d != 0) throw Error("ExtensionUnavailable", "logarithm is not of Honda type at level " + std::to_string(k));
        c[k] = s / d;
    }
    // Root of p - sum c_k d^k in pZ_p, modulo p^{n+1}.
    mpz_class Mn = ipow(p, n + 1), c1inv;
    mpz_invert(c1inv.get_mpz_t(), c[1].get_mpz_t(), Mn.get_mpz_t());
    mpz_class delta = P;
    for (int it = 0; it < n + 3; ++it) {
        mpz_class s = P, dk = delta * delta;
        for (int k = 2; k <= n; ++k) {
            s -= c[k] * dk;
            dk *= delta;
        }
        delta = s * c1inv % Mn;
        if (delta < 0) delta += Mn;
    }
    // g_n = (f^{o(n-1)}(X))^{p-1} + varpi0 with f = X^p + varpi0 X.
    mpz_class MN = ipow(p, N);
    std::vector<mpz_class> F{0, 1};
    for (int s = 1; s < n; ++s) {
        std::vector<mpz_class> Fp{1};
        for (u64 t = 0; t < p; ++t) Fp = poly_mul_mod(Fp, F, MN);
        for (size_t j = 0; j < F.size(); ++j) Fp[j] = (Fp[j] + delta * F[j]) % MN;
        F = Fp;
    }
    std::vector<mpz_class> G{1};
    for (u64 t = 0; t + 1 < p; ++t) G = poly_mul_mod(G, F, MN);
    G[0] = (G[0] + delta) % MN;
    Extension ext;
    ext.p = p;
    ext.f = 1;
    ext.eisenstein = G;
    ext.note = "Lubin-Tate level " + std::to_string(n) + " for parameter " + delta.get_str();
    if (varpi0_out) *varpi0_out = delta;
    if (honda_out) *honda_out = std::vector<mpz_class>(c.begin() + 1, c.end());
    return ext;
}

namespace {

PadicElement newton_root_diag(const LogEvaluator& E, int i, PadicElement x, bool& ok)
{
    ok = false;
    for (int it = 0; it < 60; ++it) {
        PadicElement v = E.eval_diag(i, x);
        if (v.is_zero()) {
            ok = true;
            return x;
        }
        PadicElement step = v / E.deriv_diag(i, x);
        x -= step;
        if (step.is_zero()) break;
    }
    ok = E.eval_diag(i, x).is_zero();
    return x;
}

} // namespace

CyclicTorsion solve_torsion_cyclic(const FormalLog& L, int i, int n, int N)
{
    CyclicTorsion out;
    out.component = i;
    out.n = n;
    const u64 p = L.p;
    out.ext = lubin_tate_extension(L, i, n, N, &out.varpi0, &out.honda);
    PadicField K;
    try {
        K = make_field(p, 1, out.ext.eisenstein, N);
    } catch (const Error& err) {
        std::string poly;
        for (const auto& c : out.ext.eisenstein) poly += c.get_str() + " ";
        throw Error("ExtensionUnavailable", std::string(err.what()) + "; adjoin a root of " + poly);
    }
    out.K = K;
    const int e = K->e;
    long long pn = lpow(p, n);
    Rational tmin(1, pn - lpow(p, n - 1));
    int kmax = log_terms_needed(p, tmin, N);
    LogEvaluator E(L, K, kmax);

    std::vector<std::optional<Rational>> vals(pn + 1);
    for (int k = 0; k <= n; ++k) vals[lpow(p, k)] = vq(L.coefficient(i, i, k));
    out.segments = newton_polygon(vals);

    // v(l(x)) for x at distance t from a root.
    std::vector<Rational> cv;
    for (int k = 0; k <= kmax; ++k) cv.push_back(vq(L.coefficient(i, i, k)));
    auto phi = [&](const Rational& t) {
        Rational m = cv[0] + t;
        for (int k = 1; k <= kmax; ++k) m = std::min(m, cv[k] + Rational(lpow(p, k)) * t);
        return m;
    };
    auto close = [&](const PadicElement& x, int r) {
        ++out.evaluations;
        PadicElement v = E.eval_diag(i, x);
        return v.is_zero() || vq(v) >= phi(Rational(r + 1, e));
    };

    out.roots.push_back(PadicElement::zero(K));
    const int R = e / static_cast<int>(p - 1);
    for (int s = 1; s <= n; ++s) {
        int r0 = static_cast<int>(lpow(p, n - s));
        std::vector<PadicElement> cand;
        for (u64 d = 1; d < p; ++d) {
            PadicElement x = PadicElement::from_int(K, static_cast<long long>(d)).mul_pi(r0);
            if (close(x, r0)) cand.push_back(x);
        }
        for (int r = r0 + 1; r <= R; ++r) {
            std::vector<PadicElement> next;
            for (const auto& x : cand)
                for (u64 d = 0; d < p; ++d) {
                    PadicElement y = d ? x + PadicElement::from_int(K, static_cast<long long>(d)).mul_pi(r) : x;
                    if (close(y, r)) next.push_back(y);
                }
            cand = std::move(next);
        }
        std::vector<PadicElement> found;
        for (const auto& x : cand) {
            bool ok = false;
            PadicElement z = newton_root_diag(E, i, x, ok);
            if (!ok) continue;
            bool dup = false;
            for (const auto& y : found)
                if (y.equals(z)) dup = true;
            if (!dup) found.push_back(z);
        }
        for (auto& z : found) out.roots.push_back(z);
    }
    return out;
}

int required_unramified_degree(const std::vector<std::vector<u64>>& ebar, u64 p, int fmax)
{
    int g = static_cast<int>(ebar.size());
    for (int f = 1; f <= fmax; ++f) {
        PadicField F = make_field(p, f, std::vector<std::vector<mpz_class>>{}, 1);
        auto ns = nullspace_mod(artin_schreier_matrix(ebar, F->res), p);
        if (static_cast<int>(ns.size()) == g) return f;
    }
    return -1;
}

FullTorsion solve_torsion_full(const FormalLog& L, int N, int fmax)
{
    const u64 p = L.p;
    int g = L.genus();
    if (L.kmax() < 1) throw Error("CapTooSmall", "need e^(1)");
    std::vector<std::vector<u64>> ebar(g, std::vector<u64>(g, 0));
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            const auto& x = L.e[1][i][j];
            ebar[i][j] = x.is_zero() ? 0 : mpz_class(x.to_mpz() % static_cast<unsigned long>(p)).get_ui();
        }
    if (det_mod(ebar, p) == 0) throw Error("NotOrdinary", "e^(1) is singular modulo p");
    int f = required_unramified_degree(ebar, p, fmax);
    if (f < 0) throw Error("ResidueFieldTooSmall", "no unramified degree <= " + std::to_string(fmax) + " suffices");

    std::vector<mpz_class> eis(p, 0);
    eis[0] = -mpz_class(static_cast<unsigned long>(p));
    eis[p - 1] = 1;
    FullTorsion out;
    out.K = make_field(p, f, eis, N);
    out.ext.p = p;
    out.ext.f = f;
    out.ext.eisenstein = eis;
    out.ext.note = "unramified degree " + std::to_string(f) + " with w^(p-1) = p";
    const PadicField& K = out.K;
    const ResidueField& F = K->res;

    auto ns = nullspace_mod(artin_schreier_matrix(ebar, F), p);
    int kmax = log_terms_needed(p, Rational(1, static_cast<long long>(p - 1)), N);
    LogEvaluator E(L, K, kmax);
    PadicElement w = PadicElement::uniformizer(K);

    long long total = lpow(p, g);
    for (long long idx = 0; idx < total; ++idx) {
        std::vector<u64> coord(g * f, 0);
        long long t = idx;
        for (int b = 0; b < g; ++b) {
            u64 digit = static_cast<u64>(t % static_cast<long long>(p));
            t /= static_cast<long long>(p);
            for (int c = 0; c < g * f; ++c) coord[c] = (coord[c] + digit * ns[b][c]) % p;
        }
        std::vector<ResidueField::Elt> u(g);
        std::vector<PadicElement> U(g, PadicElement(K));
        for (int j = 0; j < g; ++j) {
            u[j] = ResidueField::Elt(coord.begin() + j * f, coord.begin() + (j + 1) * f);
            if (!F.is_zero(u[j])) U[j] = PadicElement::teichmuller(K, u[j]);
        }
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            std::vector<PadicElement> X;
            for (const auto& x : U) X.push_back(w * x);
            auto G = E.eval(X);
            bool zero = true;
            for (auto& y : G) {
                y = y.mul_pi(-1);
                if (!y.is_zero()) zero = false;
            }
            if (zero) {
                ok = true;
                break;
            }
            Matrix Ji = matrix_inverse(E.scaled_jacobian(w, U));
            bool moved = false;
            for (int a = 0; a < g; ++a) {
                PadicElement d(K);
                for (int b = 0; b < g; ++b) d += Ji[a][b] * G[b];
                if (!d.is_zero()) moved = true;
                U[a] -= d;
            }
            if (!moved) break;
        }
        if (!ok) {
            std::vector<PadicElement> X;
            for (const auto& x : U) X.push_back(w * x);
            ok = true;
            for (const auto& y : E.eval(X))
                if (!y.is_zero()) ok = false;
        }
        if (!ok) throw Error("ResidualNonzero", "Newton iteration did not converge");
        std::vector<PadicElement> pi;
        for (const auto& x : U) pi.push_back(x.is_zero() ? PadicElement(K) : w * x);
        out.points.push_back(std::move(pi));
        out.residues.push_back(std::move(u));
    }
    return out;
}

// ---------------------------------------------------------------- p^n-torsion evidence

namespace {

// Reduces s against the standard basis on [lo, top]; true when the remainder vanishes there.
bool reduces_to_zero(const GrassPoint& A, LaurentSeries s, int lo)
{
    auto d = s.top();
    for (int n = d; n >= lo; --n) {
        PadicElement c = s.coeff(n);
        if (c.is_zero()) continue;
        const LaurentSeries* z = A.element_of_degree(n);
        if (!z) return false;
        s = s - z->scale(c);
    }
    return true;
}

void multisets(int kinds, int size, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (static_cast<int>(cur.size()) == size) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < kinds; ++i) {
        cur.push_back(i);
        multisets(kinds, size, i, cur, out);
        cur.pop_back();
    }
}

} // namespace

PnShape pn_window_shape(u64 p, int n, int precision)
{
    PnShape sh;
    Rational tmin(1, lpow(p, n) - lpow(p, n - 1));
    Rational vmin(1000000);
    for (int k = 0; k < 40; ++k) {
        Rational v = Rational(n - k) + Rational(lpow(p, k)) * tmin;
        if (v < precision) {
            sh.kdec = k;
            vmin = std::min(vmin, v);
        }
        if (k > n && v >= precision) break;
    }
    Rational r1(1, static_cast<long long>(p - 1));
    while (Rational(sh.mmax + 1) * vmin - Rational(sh.mmax) * r1 < precision) ++sh.mmax;
    return sh;
}

PnWindow prepare_pn_window(const GrassPoint& A, const GapData& gd, u64 p, int n, std::vector<int> support, int depth,
                           int precision)
{
    PnWindow W;
    W.p = p;
    W.n = n;
    W.depth = depth;
    W.precision = precision;
    W.support = support;
    W.mu = gd.gaps;
    PnShape sh = pn_window_shape(p, n, precision);
    W.kdec = sh.kdec;
    W.mmax = sh.mmax;
    int mumax = 0;
    for (int j : support) mumax = std::max(mumax, gd.gaps.at(j));
    W.top = static_cast<int>(W.mmax * lpow(p, W.kdec) * mumax);
    int need_floor = -depth - static_cast<int>((W.mmax - 1) * lpow(p, W.kdec) * mumax);
    if (A.cap < W.top) throw Error("WindowInsufficient", "cap " + std::to_string(A.cap) + " below " + std::to_string(W.top));
    if (A.floor() > need_floor)
        throw Error("WindowInsufficient", "basis known only down to " + std::to_string(A.floor()) + ", need " +
                                              std::to_string(need_floor));
    W.dec = decompose_frobenius(A, gd, W.kdec);

    const PadicField& K = A.K;
    int g = static_cast<int>(gd.gaps.size());
    W.reconstruction_ok = true;
    W.tails_integral = true;
    std::vector<LaurentSeries> gens;
    for (const auto& D : W.dec)
        for (int j : support) {
            long long deg = lpow(p, D.k) * gd.gaps[j];
            LaurentSeries r = LaurentSeries::monomial(PadicElement::one(K), static_cast<int>(deg), -depth);
            r = r - D.a[j] - D.t[j];
            for (int i = 0; i < g; ++i) r = r - LaurentSeries::monomial(D.e[i][j], gd.gaps[i], -depth);
            for (int m = -depth; m <= static_cast<int>(deg); ++m)
                if (!r.coeff(m).is_zero()) W.reconstruction_ok = false;
            for (const auto& c : D.t[j].coeffs())
                if (!c.is_zero() && c.ival() < 0) W.tails_integral = false;
            if (!D.t[j].is_zero() && *D.t[j].deg() > -1) W.tails_integral = false;
            if (!D.a[j].is_zero()) gens.push_back(D.a[j]);
        }
    W.products_in_A = true;
    for (int m = 1; m <= W.mmax; ++m) {
        std::vector<std::vector<int>> ms;
        std::vector<int> cur;
        multisets(static_cast<int>(gens.size()), m, 0, cur, ms);
        for (const auto& sel : ms) {
            LaurentSeries prod = gens[sel[0]];
            for (size_t s = 1; s < sel.size(); ++s) prod = prod * gens[sel[s]];
            ++W.products_checked;
            if (!reduces_to_zero(A, prod, -depth)) W.products_in_A = false;
        }
    }
    return W;
}

bool PnTorsionEvidence::ok() const
{
    return trivial || (residual_zero && inequalities_ok && window_ok && alpha_in_A && tail_in_gamma0);
}

PnTorsionEvidence verify_pn_torsion(const PnWindow& W, const FormalLog& L, const LoopElement& h)
{
    PnTorsionEvidence ev;
    ev.n = W.n;
    const u64 p = W.p;
    const int n = W.n;
    const auto& pi = h.pi;
    if (pi.empty()) throw Error("PreconditionUnmet", "loop carries no Artin-Hasse parameters");
    bool all_zero = std::all_of(pi.begin(), pi.end(), [](const PadicElement& x) { return x.is_zero(); });
    if (all_zero) {
        ev.trivial = ev.residual_zero = ev.inequalities_ok = ev.window_ok = ev.alpha_in_A = ev.tail_in_gamma0 = true;
        return ev;
    }
    const PadicField& K = h.K;
    int g = static_cast<int>(pi.size());
    std::vector<int> mu_expect;
    for (int j = 0; j < g; ++j) {
        if (pi[j].is_zero()) continue;
        if (std::find(W.support.begin(), W.support.end(), j) == W.support.end())
            throw Error("WindowInsufficient", "component outside the prepared support");
        if (h.mu[j] != W.mu[j]) throw Error("PreconditionUnmet", "loop exponents differ from the gap sequence");
    }
    Rational vmin(1000000);
    for (const auto& x : pi)
        if (!x.is_zero()) vmin = std::min(vmin, vq(x));
    int kneed = log_terms_needed(p, vmin, K->N);
    LogEvaluator E(L, K, std::min(kneed, L.kmax()));
    if (kneed > L.kmax()) throw Error("WindowInsufficient", "formal logarithm too short for the residual");
    auto res = E.eval(pi);
    ev.residual_zero = std::all_of(res.begin(), res.end(), [](const PadicElement& x) { return x.is_zero(); });
    if (!ev.residual_zero) throw Error("ResidualNonzero", "l(pi) is not zero at precision");

    Rational r1(1, static_cast<long long>(p - 1));
    Rational span(lpow(p, n) - lpow(p, n - 1));
    ev.inequalities_ok = true;
    std::optional<Rational> neg;
    for (int j = 0; j < g; ++j) {
        if (pi[j].is_zero()) continue;
        for (int k = 0; k <= std::max(kneed, n); ++k) {
            InequalityRow row;
            row.j = j;
            row.k = k;
            row.value = Rational(n - k) + Rational(lpow(p, k)) * vq(pi[j]);
            row.bound = Rational(n - 1 - k) + Rational(lpow(p, k)) / span;
            row.strict = row.value > row.bound;
            row.at_radius = row.bound == r1;
            bool shape = row.bound >= r1 && (row.at_radius == (k == n || k == n - 1));
            if (!row.strict || !shape) ev.inequalities_ok = false;
            if (k > W.kdec && (!neg || row.value < *neg)) neg = row.value;
            ev.rows.push_back(row);
        }
    }
    Rational vy(1000000);
    for (const auto& row : ev.rows)
        if (row.k <= W.kdec) vy = std::min(vy, row.value);
    Rational vexp = Rational(W.mmax + 1) * vy - Rational(W.mmax) * r1;
    if (!neg || vexp < *neg) neg = vexp;
    ev.neglected_val = neg;

    // Sum of the kept terms of p^n l(pi); the rest of the series is zero.
    bool trunc_ok = true;
    PadicElement pn = PadicElement::from_mpz(K, ipow(p, n));
    for (int i = 0; i < g; ++i) {
        PadicElement s = PadicElement::zero_at(K, K->cap());
        for (int j = 0; j < g; ++j) {
            if (pi[j].is_zero()) continue;
            PadicElement pw = pi[j];
            for (int k = 0; k <= W.kdec; ++k) {
                if (k > 0) pw = pw.pow(static_cast<long long>(p));
                if (!L.e[k][i][j].is_zero()) s += lift_to(L.coefficient(i, j, k), K) * pw;
            }
        }
        s = s * pn;
        if (s.is_zero()) {
            ev.truncated_log_vals.push_back(std::nullopt);
        } else {
            ev.truncated_log_vals.push_back(vq(s));
            if (vq(s) < W.precision) trunc_ok = false;
        }
    }
    ev.window_ok = trunc_ok && *neg >= W.precision && W.reconstruction_ok;
    ev.alpha_in_A = W.products_in_A && ev.inequalities_ok;
    ev.tail_in_gamma0 = W.tails_integral && ev.inequalities_ok;
    return ev;
}

// ---------------------------------------------------------------- tau function and theta

TauValue tau_sato(const GrassPoint& V, const LoopElement& h, int weight_cap)
{
    require_strict(V);
    const PadicField& K = h.K;
    if (h.cap() < weight_cap) throw Error("CapTooSmall", "loop known below the weight cap");
    TauValue tv;
    tv.weight_cap = weight_cap;
    tv.value = PadicElement::zero_at(K, K->cap());
    const Partition& kappa = V.partition;
    tv.inconclusive = weight_cap < kappa.weight();
    for (const auto& lam : partitions_up_to(weight_cap)) {
        if (!(lam >= kappa)) continue;
        PadicElement P = plucker(V, lam);
        if (P.is_zero()) continue;
        PadicElement S = schur(lam, h.h);
        if (S.is_zero()) continue;
        tv.value += lift_to(P, K) * S;
        ++tv.terms;
    }
    if (h.rho_val) tv.truncation_val = Rational(weight_cap + 1) * *h.rho_val;
    return tv;
}

std::string verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::OutsideThetaCertified: return "OutsideTheta-certified";
    case Verdict::InTheta: return "InTheta";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

ThetaEvidence theta_membership(const GrassPoint& V, const LoopElement& h, int window_rows, int weight_cap)
{
    require_strict(V);
    ThetaEvidence ev;
    ev.kappa = V.partition;
    ev.index = V.index;
    ev.rho_val = h.rho_val;
    const PadicField& K = h.K;
    const u64 p = K->p;
    const int tail = -V.index;

    if (!h.rho_val) {
        ev.precondition = "trivial";
        int dim = tail_intersection_dim(V, tail);
        ev.window_tail_dim = dim;
        ev.verdict = dim > 0 ? Verdict::InTheta : Verdict::OutsideThetaCertified;
        ev.s_kappa_exact = ev.kappa.empty();
        return ev;
    }

    std::vector<int> live;
    for (size_t j = 0; j < h.pi.size(); ++j)
        if (!h.pi[j].is_zero()) live.push_back(static_cast<int>(j));
    const Partition& kappa = ev.kappa;
    if (live.size() == 1 && h.mu[live[0]] == 1) {
        if (kappa.part(1) + kappa.length() > static_cast<int>(p))
            throw Error("PreconditionUnmet", "kappa_1 + l(kappa) exceeds p");
        ev.precondition = "single";
    } else {
        int g = static_cast<int>(h.mu.size());
        bool shape = kappa == Partition(std::vector<int>{g});
        for (int j = 0; j < g; ++j) shape = shape && h.mu[j] == j + 1;
        if (!shape || h.pi[g - 1].is_zero()) throw Error("PreconditionUnmet", "needs kappa = (g) and mu = (1..g)");
        for (int j = 0; j < g; ++j)
            if (!h.pi[j].is_zero() && h.pi[j].ival() < h.pi[g - 1].ival())
                throw Error("PreconditionUnmet", "|pi_j| exceeds |pi_g|");
        ev.precondition = "gap-vector";
    }

    if (h.cap() < kappa.weight()) throw Error("CapTooSmall", "loop shorter than |kappa|");
    PadicElement S = schur(kappa, h.h);
    Rational target = Rational(kappa.weight()) * *h.rho_val;
    if (!S.is_zero()) {
        ev.s_kappa_val = vq(S);
        ev.s_kappa_exact = *ev.s_kappa_val == target;
    }
    int wc = std::min(weight_cap > 0 ? weight_cap : kappa.weight() + 4, h.cap());
    TauValue tv = tau_sato(V, h, wc);
    if (!tv.value.is_zero()) ev.tau_val = vq(tv.value);

    // Rows tail+1..tail+R of h z_s for the first R basis vectors.
    int R = window_rows;
    if (static_cast<int>(V.basis.size()) < R) throw Error("CapTooSmall", "basis shorter than the window");
    ev.window_rows = R;
    const int D = h.cap();
    Rational err = Rational(D + 1) * *h.rho_val;
    std::vector<std::vector<PadicElement>> M(R, std::vector<PadicElement>(R, PadicElement(K)));
    for (int c = 0; c < R; ++c) {
        const LaurentSeries& z = V.basis[c];
        std::map<int, PadicElement> zc;
        for (int r = 0; r < R; ++r) {
            int row = tail + 1 + r;
            PadicElement acc = PadicElement::zero_at(K, K->cap());
            for (int i = 0; i <= D; ++i) {
                int m = row - i;
                if (m > z.top()) continue;
                if (m < z.floor() && !z.exact_tail()) {
                    err = std::min(err, Rational(i) * *h.rho_val);
                    break;
                }
                if (h.h[i].is_zero()) continue;
                auto it = zc.find(m);
                if (it == zc.end()) it = zc.emplace(m, lift_to(z.coeff(m), K)).first;
                if (!it->second.is_zero()) acc += h.h[i] * it->second;
            }
            M[r][c] = acc;
        }
    }
    PadicElement det = determinant(std::move(M), K);
    ev.window_error_val = err;
    if (!det.is_zero()) ev.window_det_val = vq(det);
    ev.window_tail_dim = (ev.window_det_val && *ev.window_det_val < err) ? 0 : -1;

    ev.verdict = ev.s_kappa_exact ? Verdict::OutsideThetaCertified : Verdict::Inconclusive;
    return ev;
}

TorsionCertificate certify_torsion_point(const GrassPoint& V, const FormalLog& L, const std::vector<PadicElement>& pi,
                                         const std::vector<int>& mu, int level, const std::string& component,
                                         int window_rows, int weight_cap)
{
    TorsionCertificate tc;
    tc.level = level;
    tc.component = component;
    tc.pi = pi;
    tc.mu = mu;
    const PadicField& K = pi.at(0).field();
    const u64 p = K->p;
    tc.norm_bound = Rational(1, lpow(p, level) - lpow(p, level - 1));
    tc.valuation_ok = true;
    for (const auto& x : pi)
        if (!x.is_zero()) {
            if (!tc.norm_val || vq(x) < *tc.norm_val) tc.norm_val = vq(x);
            if (vq(x) < tc.norm_bound) tc.valuation_ok = false;
        }
    if (tc.norm_val) {
        int kneed = log_terms_needed(p, *tc.norm_val, K->N);
        if (kneed > L.kmax()) throw Error("CapTooSmall", "formal logarithm too short for the residual");
        LogEvaluator E(L, K, kneed);
        auto res = E.eval(pi);
        tc.residual_zero = true;
        for (const auto& y : res) {
            Rational v = y.is_zero() ? prec_q(y) : vq(y);
            if (!y.is_zero()) tc.residual_zero = false;
            if (!tc.residual_val || v < *tc.residual_val) tc.residual_val = v;
        }
    } else {
        tc.residual_zero = true;
    }
    int cap = std::max({V.partition.weight() + 4, 16, weight_cap});
    LoopElement h = artin_hasse_loop(pi, mu, cap);
    tc.theta = theta_membership(V, h, window_rows, weight_cap);
    return tc;
}

// ---------------------------------------------------------------- filtration probe

LaurentSeries closure_element(const GrassPoint& A, const std::vector<PadicElement>& c, const PadicElement& pi)
{
    if (c.size() > A.basis.size()) throw Error("CapTooSmall", "more coefficients than basis vectors");
    const PadicField& K = pi.field();
    LaurentSeries h;
    bool first = true;
    for (size_t i = 0; i < c.size(); ++i) {
        int s = A.degrees[i];
        if (!c[i].is_zero() && s > 0 && c[i].ival() < static_cast<long long>(s) * pi.ival())
            throw Error("NotInClosure", "coefficient exceeds |pi|^s");
        if (!c[i].is_zero() && c[i].ival() < 0) throw Error("NotInClosure", "coefficient not integral");
        LaurentSeries z = A.basis[i];
        if (!same_field(z.field(), K)) {
            LaurentSeries w(K, z.floor(), z.top(), z.exact_tail());
            for (int m = z.floor(); m <= z.top(); ++m) w.set(m, lift_to(z.coeff(m), K));
            z = w;
        }
        LaurentSeries term = z.scale(c[i]);
        h = first ? term : h + term;
        first = false;
    }
    if (first) throw Error("NotInClosure", "empty combination");
    return h;
}

std::vector<ResidueField::Elt> gamma_a_filtration_probe(const LaurentSeries& h, const PadicElement& pi,
                                                        const std::vector<int>& exponents)
{
    const PadicField& K = pi.field();
    std::vector<ResidueField::Elt> out;
    for (int n : exponents) {
        PadicElement x = h.coeff(n);
        if (x.is_zero()) {
            out.push_back(K->res.zero());
            continue;
        }
        long long bound = static_cast<long long>(n) * pi.ival();
        if (x.ival() < bound) throw Error("NotInClosure", "coefficient at " + std::to_string(n) + " exceeds |pi|^n");
        if (x.ival() > bound) {
            out.push_back(K->res.zero());
            continue;
        }
        out.push_back((x / pi.pow(n)).residue());
    }
    return out;
}

// ---------------------------------------------------------------- non-Weierstrass search

std::optional<NonWeierstrassInstance> find_nonweierstrass_instance(u64 p, int N, int bound)
{
    PadicField K = make_qp(p, N);
    std::optional<NonWeierstrassInstance> best;
    std::vector<int> vals;
    vals.push_back(0);
    for (int b = 1; b <= bound; ++b) {
        vals.push_back(b);
        vals.push_back(-b);
    }
    for (int a3 : vals)
        for (int a2 : vals)
            for (int a1 : vals)
                for (int a0 : vals) {
                    std::vector<mpz_class> F{a0, a1, a2, a3, 0, 1};
                    CurveModel C;
                    try {
                        C = superelliptic(K, 2, {BranchFactor{F, 1}});
                    } catch (const Error&) {
                        continue;
                    }
                    HasseWitt hw = hasse_witt(C);
                    if (!hw.ordinary) continue;
                    int f = required_unramified_degree(hw.matrix, p, 12);
                    if (f < 0 || (best && f >= best->f)) continue;
                    for (long long x0 = 0; x0 < static_cast<long long>(p); ++x0) {
                        mpz_class v = 0, P = static_cast<unsigned long>(p);
                        for (size_t i = F.size(); i-- > 0;) v = v * static_cast<long>(x0) + F[i];
                        v %= P;
                        if (v < 0) v += P;
                        if (v == 0) continue;
                        long long r = -1;
                        for (long long y = 1; y < static_cast<long long>(p); ++y)
                            if ((y * y) % static_cast<long long>(p) == v.get_si()) r = y;
                        if (r < 0) continue;
                        mpz_class Fx = 0;
                        for (size_t i = F.size(); i-- > 0;) Fx = Fx * static_cast<long>(x0) + F[i];
                        std::vector<PadicElement> q{PadicElement::from_mpz(K, -Fx), PadicElement(K), PadicElement::one(K)};
                        PadicElement y0 = hensel_lift(q, PadicElement::from_int(K, r));
                        CurveModel Ca = with_affine_base(C, PadicElement::from_int(K, x0), y0);
                        AffineRing R = affine_ring(Ca, 12, 4);
                        if (!R.A.theorem_backed || R.gd.gaps != std::vector<int>{1, 2}) continue;
                        NonWeierstrassInstance inst;
                        inst.p = p;
                        inst.F = F;
                        inst.x0 = x0;
                        inst.y0 = y0;
                        inst.f = f;
                        inst.C = Ca;
                        best = inst;
                        break;
                    }
                    if (best && best->f == 1) return best;
                }
    return best;
}

} // namespace soliton
