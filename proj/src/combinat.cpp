#include "soliton/combinat.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "soliton/error.hpp"

namespace soliton {

Partition::Partition(std::vector<int> p) : parts(std::move(p))
{
    while (!parts.empty() && parts.back() == 0) parts.pop_back();
    for (size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] <= 0) throw Error("NotPartition", "parts must be positive");
        if (i && parts[i] > parts[i - 1]) throw Error("NotPartition", "parts must be weakly decreasing");
    }
}

int Partition::weight() const
{
    int s = 0;
    for (int x : parts) s += x;
    return s;
}

bool Partition::operator<=(const Partition& o) const
{
    int n = std::max(length(), o.length());
    for (int i = 1; i <= n; ++i)
        if (part(i) > o.part(i)) return false;
    return true;
}

std::string Partition::str() const
{
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < parts.size(); ++i) os << (i ? "," : "") << parts[i];
    os << ")";
    return os.str();
}

std::vector<Partition> partitions_of(int n)
{
    std::vector<Partition> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int left, int maxp) {
        if (left == 0) { out.emplace_back(cur); return; }
        for (int k = std::min(left, maxp); k >= 1; --k) {
            cur.push_back(k);
            rec(left - k, k);
            cur.pop_back();
        }
    };
    rec(n, n);
    return out;
}

std::vector<Partition> partitions_up_to(int n)
{
    std::vector<Partition> out;
    for (int k = 0; k <= n; ++k)
        for (auto& p : partitions_of(k)) out.push_back(std::move(p));
    return out;
}

std::vector<int> MayaDiagram::first(int count) const
{
    std::vector<int> s;
    int n = low.empty() ? 1 : *low.begin();
    while (static_cast<int>(s.size()) < count) {
        if (contains(n)) s.push_back(n);
        ++n;
    }
    return s;
}

std::pair<int, Partition> maya_to_pair(const MayaDiagram& M)
{
    int idx = M.index();
    int maxgap = M.gaps.empty() ? 0 : *M.gaps.rbegin();
    // Beyond the last gap every s_i equals i - index.
    int count = static_cast<int>(M.low.size()) + std::max(0, maxgap) + 1;
    std::vector<int> s = M.first(count);
    std::vector<int> kappa;
    for (int i = 1; i <= count; ++i) kappa.push_back(i - idx - s[i - 1]);
    return {idx, Partition(kappa)};
}

MayaDiagram pair_to_maya(int index, const Partition& kappa)
{
    MayaDiagram M;
    int l = kappa.length();
    std::set<int> members;
    for (int i = 1; i <= l; ++i) members.insert(i - index - kappa.part(i));
    int tail = l + 1 - index; // s_{l+1}; all integers from here on are members
    for (int n : members)
        if (n <= 0) M.low.insert(n);
    for (int n = std::min(0, tail); n <= 0; ++n)
        if (n >= tail) M.low.insert(n);
    for (int n = 1; n < tail; ++n)
        if (!members.count(n)) M.gaps.insert(n);
    return M;
}

MayaDiagram maya_from_degrees(const std::set<int>& degrees, int cap)
{
    MayaDiagram M;
    for (int d : degrees)
        if (d <= 0) M.low.insert(d);
    for (int n = 1; n <= cap; ++n)
        if (!degrees.count(n)) M.gaps.insert(n);
    return M;
}

int hook_length(const Partition& lambda, int i, int j)
{
    if (i < 1 || i > lambda.length() || j < 1 || j > lambda.part(i))
        throw Error("CellOutOfShape", "cell outside the Young diagram");
    int arm = lambda.part(i) - j;
    int leg = 0;
    for (int k = i + 1; k <= lambda.length() && lambda.part(k) >= j; ++k) ++leg;
    return arm + leg + 1;
}

PadicElement determinant(std::vector<std::vector<PadicElement>> M, const PadicField& K)
{
    const int n = static_cast<int>(M.size());
    PadicElement det = PadicElement::one(K);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r) {
            if (M[r][c].is_zero()) continue;
            if (piv < 0 || M[r][c].ival() < M[piv][c].ival()) piv = r;
        }
        if (piv < 0) {
            // Zero at precision: the determinant is zero to the precision of the column.
            int prec = PadicElement::kInf;
            for (int r = c; r < n; ++r) prec = std::min(prec, M[r][c].prec());
            return PadicElement::zero_at(K, prec) * det;
        }
        if (piv != c) {
            std::swap(M[piv], M[c]);
            det = -det;
        }
        det *= M[c][c];
        PadicElement inv = M[c][c].inv();
        for (int r = c + 1; r < n; ++r) {
            if (M[r][c].is_zero()) continue;
            PadicElement f = M[r][c] * inv;
            for (int k = c + 1; k < n; ++k) M[r][k] -= f * M[c][k];
        }
    }
    return det;
}

PadicElement schur(const Partition& lambda, const std::vector<PadicElement>& h)
{
    if (h.empty()) throw Error("InsufficientCoefficients", "empty loop");
    const PadicField& K = h[0].field();
    int l = lambda.length();
    if (l == 0) return PadicElement::one(K);
    int need = lambda.part(1) - 1 + l;
    if (static_cast<int>(h.size()) <= need) throw Error("InsufficientCoefficients", "loop truncated below the Schur degree");
    std::vector<std::vector<PadicElement>> M(l, std::vector<PadicElement>(l, PadicElement(K)));
    for (int i = 1; i <= l; ++i)
        for (int j = 1; j <= l; ++j) {
            int k = lambda.part(i) - i + j;
            if (k >= 0) M[i - 1][j - 1] = h[k];
        }
    return determinant(std::move(M), K);
}

PadicElement hook_schur_value(const Partition& lambda, const PadicElement& pi, u64 p)
{
    if (lambda.empty()) return PadicElement::one(pi.field());
    if (static_cast<u64>(lambda.length() + lambda.part(1)) > p)
        throw Error("ShapeTooLarge", "l(lambda) + lambda_1 exceeds p");
    mpz_class prod = 1;
    for (int i = 1; i <= lambda.length(); ++i)
        for (int j = 1; j <= lambda.part(i); ++j) prod *= hook_length(lambda, i, j);
    return pi.pow(lambda.weight()) / PadicElement::from_mpz(pi.field(), prod);
}

} // namespace soliton
