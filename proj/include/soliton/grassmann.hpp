#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "soliton/combinat.hpp"
#include "soliton/series.hpp"

namespace soliton {

enum class Integrality { Bounded, Integral, Strict, UnboundedAtCap };
std::string integrality_name(Integrality c);

// Point of the Grassmannian over the residue field, materialized up to a cap.
struct ResidueGrassPoint {
    ResidueField F;
    int cap = 0;
    std::vector<ResidueSeries> basis;
    std::vector<int> degrees;
    MayaDiagram maya;
    int index = 0;
    Partition partition;
};

// A point of the Sato Grassmannian through its standard basis, complete for degrees <= cap.
struct GrassPoint {
    PadicField K;
    int cap = 0;
    std::vector<LaurentSeries> basis; // increasing degree, monic
    std::vector<int> degrees;         // s_1 < s_2 < ... (those <= cap)
    MayaDiagram maya;
    int index = 0;
    Partition partition;
    std::optional<Integrality> integrality;
    bool theorem_backed = false;

    const LaurentSeries* element_of_degree(int n) const;
    int floor() const; // highest floor among basis elements
};

GrassPoint standard_basis(const std::vector<LaurentSeries>& vectors, int cap);

PadicElement plucker(const GrassPoint& V, const Partition& lambda);

struct IntegralityReport {
    Integrality cls = Integrality::Bounded;
    int decided_at_cap = 0;
    bool maya_equal = false;        // M(V) = M(V^red) through the cap
    std::vector<int> nonunit_rows;  // indices i (1-based) with ||v_i|| > 1
    ResidueGrassPoint reduction;
};

IntegralityReport classify_integrality(const GrassPoint& V);

GrassPoint subspace_product(const GrassPoint& V, const GrassPoint& W);
GrassPoint homothety(const GrassPoint& V, const LaurentSeries& h, int cap);

// dim { v in V : deg v <= n }, requires n <= cap.
int tail_intersection_dim(const GrassPoint& V, int n);

} // namespace soliton
