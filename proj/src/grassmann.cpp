#include "soliton/grassmann.hpp"

#include <algorithm>
#include <climits>

#include "soliton/error.hpp"

namespace soliton {

std::string integrality_name(Integrality c)
{
    switch (c) {
    case Integrality::Bounded: return "bounded";
    case Integrality::Integral: return "integral";
    case Integrality::Strict: return "strict";
    case Integrality::UnboundedAtCap: return "unbounded-at-cap";
    }
    return "?";
}

const LaurentSeries* GrassPoint::element_of_degree(int n) const
{
    auto it = std::lower_bound(degrees.begin(), degrees.end(), n);
    if (it == degrees.end() || *it != n) return nullptr;
    return &basis[it - degrees.begin()];
}

int GrassPoint::floor() const
{
    int f = INT_MIN;
    for (const auto& b : basis) f = std::max(f, b.floor());
    return f;
}

namespace {

void finish(GrassPoint& V)
{
    std::set<int> ds(V.degrees.begin(), V.degrees.end());
    V.maya = maya_from_degrees(ds, V.cap);
    auto [idx, kappa] = maya_to_pair(V.maya);
    V.index = idx;
    V.partition = kappa;
}

} // namespace

GrassPoint standard_basis(const std::vector<LaurentSeries>& vectors, int cap)
{
    if (vectors.empty()) throw Error("DegenerateSpan", "no vectors");
    const PadicField& K = vectors.front().field();
    std::map<int, LaurentSeries> piv;
    for (const auto& v : vectors) {
        LaurentSeries w = v;
        for (;;) {
            auto d = w.deg();
            if (!d) break;
            auto it = piv.find(*d);
            PadicElement lead = w.coeff(*d);
            if (it == piv.end()) {
                if (lead.prec() != PadicElement::kInf && lead.prec() - lead.ival() < K->e)
                    throw Error("DegenerateSpan", "leading coefficient below one digit of precision");
                piv.emplace(*d, w.scale(lead.inv()));
                break;
            }
            w = w - it->second.scale(lead);
        }
    }
    // Clear coefficients at lower pivot degrees.
    std::vector<int> degs;
    for (auto& [d, v] : piv) degs.push_back(d);
    for (size_t i = 0; i < degs.size(); ++i) {
        LaurentSeries& vi = piv.at(degs[i]);
        for (size_t j = i; j-- > 0;) {
            int sj = degs[j];
            if (sj < vi.floor() && !vi.exact_tail()) break;
            PadicElement c = vi.coeff(sj);
            if (c.is_zero()) continue;
            vi = vi - piv.at(sj).scale(c);
            vi.set(sj, PadicElement(K));
        }
    }
    GrassPoint V;
    V.K = K;
    V.cap = cap;
    for (int d : degs)
        if (d <= cap) {
            V.degrees.push_back(d);
            V.basis.push_back(piv.at(d));
        }
    finish(V);
    return V;
}

PadicElement plucker(const GrassPoint& V, const Partition& lambda)
{
    int n = std::max(lambda.length(), V.partition.length());
    if (n == 0) return PadicElement::one(V.K);
    if (static_cast<int>(V.degrees.size()) < n) throw Error("CapTooSmall", "basis too short for the Pluecker minor");
    std::vector<std::vector<PadicElement>> M(n, std::vector<PadicElement>(n, PadicElement(V.K)));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            int k = j - lambda.part(j) - V.index;
            const LaurentSeries& v = V.basis[i - 1];
            if (k < v.floor() && !v.exact_tail()) throw Error("CapTooSmall", "basis tail too short for the Pluecker minor");
            M[i - 1][j - 1] = v.coeff(k);
        }
    return determinant(std::move(M), V.K);
}

namespace {

PadicElement lift(const PadicField& K, const ResidueField::Elt& r)
{
    return PadicElement::from_raw(K, K->raw_from_residue(r));
}

int min_ival(const LaurentSeries& s)
{
    int m = PadicElement::kInf;
    for (const auto& c : s.coeffs())
        if (!c.is_zero()) m = std::min(m, c.ival());
    return m;
}

} // namespace

IntegralityReport classify_integrality(const GrassPoint& V)
{
    const PadicField& K = V.K;
    IntegralityReport rep;
    rep.decided_at_cap = V.cap;
    PadicElement pi = PadicElement::uniformizer(K);
    struct RP {
        LaurentSeries w;
        ResidueSeries r;
    };
    std::map<int, RP> rpiv;
    for (size_t i = 0; i < V.basis.size(); ++i) {
        int mv = min_ival(V.basis[i]);
        if (mv < 0) rep.nonunit_rows.push_back(static_cast<int>(i) + 1);
        LaurentSeries w = V.basis[i];
        for (int guard = 0; guard < 100000; ++guard) {
            int m = min_ival(w);
            if (m == PadicElement::kInf) break;
            if (m != 0) w = w.scale(pi.pow(-m));
            ResidueSeries r = w.reduce_mod_p();
            auto d = r.deg();
            if (!d) continue;
            auto it = rpiv.find(*d);
            if (it == rpiv.end()) {
                rpiv.emplace(*d, RP{w, r});
                break;
            }
            const ResidueField& F = r.F;
            ResidueField::Elt c = F.mul(r.coeff(*d), F.inv(it->second.r.coeff(*d)));
            w = w - it->second.w.scale(lift(K, c));
        }
    }
    ResidueGrassPoint& R = rep.reduction;
    R.F = K->res;
    R.cap = V.cap;
    std::set<int> rdeg;
    for (auto& [d, rp] : rpiv)
        if (d <= V.cap) {
            rdeg.insert(d);
            R.degrees.push_back(d);
            R.basis.push_back(rp.r);
        }
    R.maya = maya_from_degrees(rdeg, V.cap);
    auto [ri, rk] = maya_to_pair(R.maya);
    R.index = ri;
    R.partition = rk;

    std::set<int> vdeg(V.degrees.begin(), V.degrees.end());
    rep.maya_equal = (vdeg == rdeg);
    if (rep.nonunit_rows.empty() && rep.maya_equal) {
        rep.cls = Integrality::Strict;
    } else {
        int lastgap = V.maya.gaps.empty() ? 0 : *V.maya.gaps.rbegin();
        bool confined = true;
        for (int i : rep.nonunit_rows)
            if (V.degrees[i - 1] > lastgap) confined = false;
        rep.cls = (confined && R.index == V.index) ? Integrality::Integral : Integrality::Bounded;
    }
    return rep;
}

GrassPoint subspace_product(const GrassPoint& V, const GrassPoint& W)
{
    if (!same_field(V.K, W.K)) throw Error("FieldMismatch", "points over different fields");
    if (V.degrees.empty() || W.degrees.empty()) throw Error("CapTooSmall", "empty basis");
    int cap = std::min(V.cap + W.degrees.front(), W.cap + V.degrees.front());
    std::vector<LaurentSeries> prods;
    std::vector<std::pair<int, std::pair<size_t, size_t>>> order;
    for (size_t i = 0; i < V.basis.size(); ++i)
        for (size_t j = 0; j < W.basis.size(); ++j) order.push_back({V.degrees[i] + W.degrees[j], {i, j}});
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [d, ij] : order) prods.push_back(V.basis[ij.first] * W.basis[ij.second]);
    return standard_basis(prods, cap);
}

GrassPoint homothety(const GrassPoint& V, const LaurentSeries& h, int cap)
{
    std::vector<LaurentSeries> vs;
    for (const auto& b : V.basis) vs.push_back(h * b);
    return standard_basis(vs, cap);
}

int tail_intersection_dim(const GrassPoint& V, int n)
{
    if (n > V.cap) throw Error("CapTooSmall", "degree above the cap");
    return static_cast<int>(std::count_if(V.degrees.begin(), V.degrees.end(), [n](int s) { return s <= n; }));
}

} // namespace soliton
