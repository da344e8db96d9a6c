#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "soliton/padic.hpp"

namespace soliton {

struct Partition {
    std::vector<int> parts; // weakly decreasing, positive

    Partition() = default;
    explicit Partition(std::vector<int> p); // trailing zeros dropped; throws NotPartition

    int length() const { return static_cast<int>(parts.size()); }
    int weight() const;
    int part(int i) const { return i >= 1 && i <= length() ? parts[i - 1] : 0; } // 1-based
    bool empty() const { return parts.empty(); }
    // Componentwise order with implicit zeros.
    bool operator<=(const Partition& o) const;
    bool operator>=(const Partition& o) const { return o <= *this; }
    bool operator==(const Partition& o) const { return parts == o.parts; }
    bool operator<(const Partition& o) const { return parts < o.parts; } // lexicographic, for containers
    std::string str() const;
};

std::vector<Partition> partitions_of(int n);
std::vector<Partition> partitions_up_to(int n);

struct MayaDiagram {
    std::set<int> low;  // M intersect Z_{<=0}
    std::set<int> gaps; // Z_{>0} minus M

    int index() const { return static_cast<int>(low.size()) - static_cast<int>(gaps.size()); }
    bool contains(int n) const { return n <= 0 ? low.count(n) > 0 : gaps.count(n) == 0; }
    std::vector<int> first(int count) const; // s_1 < s_2 < ... < s_count
    bool operator==(const MayaDiagram& o) const { return low == o.low && gaps == o.gaps; }
};

std::pair<int, Partition> maya_to_pair(const MayaDiagram& M);
MayaDiagram pair_to_maya(int index, const Partition& kappa);
MayaDiagram maya_from_degrees(const std::set<int>& degrees, int cap); // degrees assumed complete up to cap

int hook_length(const Partition& lambda, int i, int j);

// Determinant by elimination with minimal-valuation pivots.
PadicElement determinant(std::vector<std::vector<PadicElement>> M, const PadicField& K);

// h[k] is the coefficient h_k, h[0] = 1.
PadicElement schur(const Partition& lambda, const std::vector<PadicElement>& h);
PadicElement hook_schur_value(const Partition& lambda, const PadicElement& pi, u64 p);

} // namespace soliton
