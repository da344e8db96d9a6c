#include "soliton/series.hpp"

#include <algorithm>
#include <climits>

#include "soliton/error.hpp"

namespace soliton {

namespace {

void check_field(const PadicField& a, const PadicField& b)
{
    if (!same_field(a, b)) throw Error("FieldMismatch", "series over different fields");
}

bool exactly_zero(const PadicElement& x)
{
    return x.is_zero() && x.prec() == PadicElement::kInf;
}

} // namespace

std::optional<int> ResidueSeries::deg() const
{
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
        if (!F.is_zero(coeffs[i])) return floor + i;
    return std::nullopt;
}

ResidueField::Elt ResidueSeries::coeff(int n) const
{
    if (n < floor || n > top()) return F.zero();
    return coeffs[n - floor];
}

LaurentSeries::LaurentSeries(PadicField K, int floor, int top, bool exact_tail)
    : K_(std::move(K)), floor_(floor), exact_(exact_tail)
{
    if (top >= floor) c_.assign(top - floor + 1, PadicElement(K_));
}

LaurentSeries LaurentSeries::zero(const PadicField& K, int floor, bool exact_tail)
{
    return LaurentSeries(K, floor, floor - 1, exact_tail);
}

LaurentSeries LaurentSeries::monomial(const PadicElement& c, int n, int floor)
{
    LaurentSeries s(c.field(), std::min(floor, n), n, true);
    s.set(n, c);
    return s;
}

LaurentSeries LaurentSeries::from_coeffs(const PadicField& K, int floor, std::vector<PadicElement> c, bool exact_tail)
{
    LaurentSeries s(K, floor, floor - 1, exact_tail);
    s.c_ = std::move(c);
    s.trim_top();
    return s;
}

void LaurentSeries::trim_top()
{
    while (!c_.empty() && exactly_zero(c_.back())) c_.pop_back();
}

PadicElement LaurentSeries::coeff(int n) const
{
    if (n > top()) return PadicElement(K_);
    if (n < floor_) {
        if (exact_) return PadicElement(K_);
        throw Error("OutOfWindow", "coefficient below the stored floor");
    }
    return c_[n - floor_];
}

void LaurentSeries::set(int n, const PadicElement& v)
{
    if (n < floor_) {
        if (!exact_) throw Error("OutOfWindow", "cannot set below the stored floor");
        c_.insert(c_.begin(), floor_ - n, PadicElement(K_));
        floor_ = n;
    }
    if (n > top()) c_.resize(n - floor_ + 1, PadicElement(K_));
    c_[n - floor_] = v;
}

std::optional<int> LaurentSeries::deg() const
{
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i)
        if (!c_[i].is_zero()) return floor_ + i;
    return std::nullopt;
}

DegreeNorm LaurentSeries::degree_norm() const
{
    DegreeNorm r;
    r.deg = deg();
    for (const auto& c : c_)
        if (!c.is_zero()) {
            Rational v = c.val();
            if (!r.norm_val || v < *r.norm_val) r.norm_val = v;
        }
    return r;
}

LaurentSeries LaurentSeries::operator+(const LaurentSeries& o) const
{
    check_field(K_, o.K_);
    int fl;
    bool ex = exact_ && o.exact_;
    if (ex) fl = std::min(floor_, o.floor_);
    else if (exact_) fl = o.floor_;
    else if (o.exact_) fl = floor_;
    else fl = std::max(floor_, o.floor_);
    int tp = std::max(top(), o.top());
    LaurentSeries r(K_, fl, tp, ex);
    for (int n = fl; n <= tp; ++n) r.c_[n - fl] = coeff(n) + o.coeff(n);
    r.trim_top();
    return r;
}

LaurentSeries LaurentSeries::operator-() const
{
    LaurentSeries r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

LaurentSeries LaurentSeries::operator-(const LaurentSeries& o) const
{
    return *this + (-o);
}

LaurentSeries LaurentSeries::operator*(const LaurentSeries& o) const
{
    check_field(K_, o.K_);
    const int ta = top(), tb = o.top();
    if (c_.empty() || o.c_.empty()) {
        int fl = (exact_ || o.exact_) ? std::min(floor_, o.floor_) : std::max(floor_ + tb, o.floor_ + ta);
        return zero(K_, fl, exact_ && o.exact_);
    }
    bool ex = exact_ && o.exact_;
    int fl;
    if (ex) {
        fl = floor_ + o.floor_;
    } else {
        fl = INT_MIN;
        if (!exact_) fl = std::max(fl, floor_ + tb);
        if (!o.exact_) fl = std::max(fl, o.floor_ + ta);
    }
    int tp = ta + tb;
    LaurentSeries r(K_, fl, tp, ex);
    for (int n = fl; n <= tp; ++n) {
        PadicElement s(K_);
        int ilo = std::max(floor_, n - tb), ihi = std::min(ta, n - o.floor_);
        for (int i = ilo; i <= ihi; ++i) {
            const PadicElement& a = c_[i - floor_];
            if (a.is_zero() && a.prec() == PadicElement::kInf) continue;
            s += a * o.c_[n - i - o.floor_];
        }
        r.c_[n - fl] = s;
    }
    r.trim_top();
    return r;
}

LaurentSeries LaurentSeries::scale(const PadicElement& c) const
{
    LaurentSeries r = *this;
    for (auto& x : r.c_) x = x * c;
    r.trim_top();
    return r;
}

LaurentSeries LaurentSeries::shift(int k) const
{
    LaurentSeries r = *this;
    r.floor_ += k;
    return r;
}

LaurentSeries LaurentSeries::truncate_below(int floor) const
{
    if (floor <= floor_) return *this;
    LaurentSeries r(K_, floor, top(), false);
    for (int n = floor; n <= top(); ++n) r.c_[n - floor] = c_[n - floor_];
    return r;
}

ResidueSeries LaurentSeries::reduce_mod_p() const
{
    ResidueSeries r;
    r.F = K_->res;
    r.floor = floor_;
    for (const auto& c : c_) {
        if (!c.is_zero() && c.ival() < 0) throw Error("NotIntegral", "series has a coefficient of negative valuation");
        r.coeffs.push_back(c.residue());
    }
    return r;
}

// ---------------------------------------------------------------- windows

WindowSeries::WindowSeries(PadicField K, int lo, int hi, bool exact_below, bool exact_above)
    : K_(std::move(K)), lo_(lo), hi_(hi), glo_(lo), ghi_(hi), exact_below_(exact_below), exact_above_(exact_above)
{
    if (hi >= lo) c_.assign(hi - lo + 1, PadicElement(K_));
}

std::optional<Rational> WindowSeries::norm_bound() const
{
    std::optional<Rational> r;
    for (const auto& c : c_)
        if (!c.is_zero() && (!r || c.val() < *r)) r = c.val();
    return r;
}

PadicElement WindowSeries::coeff(int n) const
{
    if (n >= lo_ && n <= hi_) return c_[n - lo_];
    if ((n < lo_ && exact_below_) || (n > hi_ && exact_above_)) return PadicElement(K_);
    throw Error("OutOfWindow", "coefficient outside the window");
}

void WindowSeries::set(int n, const PadicElement& v)
{
    if (n < lo_ || n > hi_) throw Error("OutOfWindow", "coefficient outside the window");
    c_[n - lo_] = v;
}

namespace {

struct Known {
    long long lo, hi; // exact on [lo, hi]
};

Known known_range(int glo, int ghi, int lo, int hi, bool eb, bool ea)
{
    Known k{glo, ghi};
    if (eb && glo == lo) k.lo = LLONG_MIN / 4;
    if (ea && ghi == hi) k.hi = LLONG_MAX / 4;
    return k;
}

} // namespace

WindowSeries WindowSeries::operator+(const WindowSeries& o) const
{
    check_field(K_, o.K_);
    bool ub1 = !(exact_below_ && glo_ == lo_), ub2 = !(o.exact_below_ && o.glo_ == o.lo_);
    bool ua1 = !(exact_above_ && ghi_ == hi_), ua2 = !(o.exact_above_ && o.ghi_ == o.hi_);
    int lo = (!ub1 && !ub2) ? std::min(lo_, o.lo_) : (!ub1 ? o.lo_ : (!ub2 ? lo_ : std::max(lo_, o.lo_)));
    int hi = (!ua1 && !ua2) ? std::max(hi_, o.hi_) : (!ua1 ? o.hi_ : (!ua2 ? hi_ : std::min(hi_, o.hi_)));
    WindowSeries r(K_, lo, hi, !ub1 && !ub2, !ua1 && !ua2);
    Known a = known_range(glo_, ghi_, lo_, hi_, exact_below_, exact_above_);
    Known b = known_range(o.glo_, o.ghi_, o.lo_, o.hi_, o.exact_below_, o.exact_above_);
    r.glo_ = static_cast<int>(std::max<long long>({a.lo, b.lo, lo}));
    r.ghi_ = static_cast<int>(std::min<long long>({a.hi, b.hi, hi}));
    for (int n = lo; n <= hi; ++n) {
        PadicElement x = (n >= lo_ && n <= hi_) || (n < lo_ && exact_below_) || (n > hi_ && exact_above_) ? coeff(n) : PadicElement(K_);
        PadicElement y = (n >= o.lo_ && n <= o.hi_) || (n < o.lo_ && o.exact_below_) || (n > o.hi_ && o.exact_above_) ? o.coeff(n) : PadicElement(K_);
        r.c_[n - lo] = x + y;
    }
    return r;
}

WindowSeries WindowSeries::operator*(const WindowSeries& o) const
{
    check_field(K_, o.K_);
    int lo = lo_ + o.lo_, hi = hi_ + o.hi_;
    bool ub1 = !(exact_below_ && glo_ == lo_), ub2 = !(o.exact_below_ && o.glo_ == o.lo_);
    bool ua1 = !(exact_above_ && ghi_ == hi_), ua2 = !(o.exact_above_ && o.ghi_ == o.hi_);
    WindowSeries r(K_, lo, hi, !ub1 && !ub2, !ua1 && !ua2);
    long long glo = lo, ghi = hi;
    const long long none_lo = LLONG_MAX / 4, none_hi = LLONG_MIN / 4;
    // Unknown a_i below glo_ pair with b_{n-i}; they vanish only when n - i > ghi of b for every such i.
    if (ub1) glo = ua2 ? none_lo : std::max<long long>(glo, o.ghi_ + glo_);
    if (ua1) ghi = ub2 ? none_hi : std::min<long long>(ghi, o.glo_ + ghi_);
    if (ub2) glo = ua1 ? none_lo : std::max<long long>(glo, ghi_ + o.glo_);
    if (ua2) ghi = ub1 ? none_hi : std::min<long long>(ghi, glo_ + o.ghi_);
    if (glo > ghi) { r.glo_ = 1; r.ghi_ = 0; }
    else { r.glo_ = static_cast<int>(glo); r.ghi_ = static_cast<int>(ghi); }
    for (int n = lo; n <= hi; ++n) {
        PadicElement s(K_);
        int ilo = std::max(lo_, n - o.hi_), ihi = std::min(hi_, n - o.lo_);
        for (int i = ilo; i <= ihi; ++i) s += c_[i - lo_] * o.c_[n - i - o.lo_];
        r.c_[n - lo] = s;
    }
    return r;
}

WindowSeries WindowSeries::scale(const PadicElement& c) const
{
    WindowSeries r = *this;
    for (auto& x : r.c_) x = x * c;
    return r;
}

} // namespace soliton
