#pragma once

#include <optional>
#include <vector>

#include "soliton/padic.hpp"

namespace soliton {

struct DegreeNorm {
    std::optional<int> deg;           // nullopt for the zero series
    std::optional<Rational> norm_val; // minimum coefficient valuation; |v| = p^{-norm_val}
};

// Residue-field series in the descending variable, coefficients on [floor, top].
struct ResidueSeries {
    ResidueField F;
    int floor = 0;
    std::vector<ResidueField::Elt> coeffs;
    int top() const { return floor + static_cast<int>(coeffs.size()) - 1; }
    std::optional<int> deg() const;
    ResidueField::Elt coeff(int n) const;
};

// Sum_{i <= top} a_i T^i with coefficients stored on [floor, top]. Exponents above top are exactly zero;
// below floor they are unknown unless exact_tail is set, in which case they are exactly zero.
class LaurentSeries {
public:
    LaurentSeries() = default;
    LaurentSeries(PadicField K, int floor, int top, bool exact_tail = false);

    static LaurentSeries zero(const PadicField& K, int floor, bool exact_tail = false);
    static LaurentSeries monomial(const PadicElement& c, int n, int floor);
    static LaurentSeries from_coeffs(const PadicField& K, int floor, std::vector<PadicElement> c, bool exact_tail = false);

    const PadicField& field() const { return K_; }
    int floor() const { return floor_; }
    int top() const { return floor_ + static_cast<int>(c_.size()) - 1; }
    bool exact_tail() const { return exact_; }
    const std::vector<PadicElement>& coeffs() const { return c_; }

    PadicElement coeff(int n) const;
    void set(int n, const PadicElement& v);

    std::optional<int> deg() const;
    DegreeNorm degree_norm() const;
    bool is_zero() const { return !deg().has_value(); }

    LaurentSeries operator+(const LaurentSeries& o) const;
    LaurentSeries operator-(const LaurentSeries& o) const;
    LaurentSeries operator-() const;
    LaurentSeries operator*(const LaurentSeries& o) const;
    LaurentSeries scale(const PadicElement& c) const;
    LaurentSeries shift(int k) const; // times T^k
    LaurentSeries truncate_below(int floor) const;

    ResidueSeries reduce_mod_p() const;

private:
    void trim_top();
    PadicField K_;
    int floor_ = 0;
    std::vector<PadicElement> c_;
    bool exact_ = false;
};

// A finite window [lo, hi] of an element of H. Outside the window coefficients are unknown unless the
// corresponding exactness flag says they vanish.
class WindowSeries {
public:
    WindowSeries() = default;
    WindowSeries(PadicField K, int lo, int hi, bool exact_below = false, bool exact_above = false);

    const PadicField& field() const { return K_; }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    bool exact_below() const { return exact_below_; }
    bool exact_above() const { return exact_above_; }
    // Sub-window on which the stored coefficients are exact, empty when glo > ghi.
    int guaranteed_lo() const { return glo_; }
    int guaranteed_hi() const { return ghi_; }
    std::optional<Rational> norm_bound() const; // minimum stored valuation

    PadicElement coeff(int n) const;
    void set(int n, const PadicElement& v);

    WindowSeries operator+(const WindowSeries& o) const;
    WindowSeries operator*(const WindowSeries& o) const;
    WindowSeries scale(const PadicElement& c) const;

private:
    PadicField K_;
    int lo_ = 0, hi_ = -1;
    int glo_ = 0, ghi_ = -1;
    bool exact_below_ = false, exact_above_ = false;
    std::vector<PadicElement> c_;
};

} // namespace soliton
