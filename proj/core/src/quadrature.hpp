#pragma once

#include <array>

namespace pdbc::quadrature {

/// Barycentric point and weight (weights sum to one; scale by the area).
struct TrianglePoint {
  std::array<double, 3> bary;
  double weight;
};

/// Six-point symmetric rule, exact for polynomials of degree 4.
inline constexpr std::array<TrianglePoint, 6> kTriangleDegree4{{
    {{0.445948490915965, 0.445948490915965, 0.108103018168070}, 0.223381589678011},
    {{0.445948490915965, 0.108103018168070, 0.445948490915965}, 0.223381589678011},
    {{0.108103018168070, 0.445948490915965, 0.445948490915965}, 0.223381589678011},
    {{0.091576213509771, 0.091576213509771, 0.816847572980459}, 0.109951743655322},
    {{0.091576213509771, 0.816847572980459, 0.091576213509771}, 0.109951743655322},
    {{0.816847572980459, 0.091576213509771, 0.091576213509771}, 0.109951743655322},
}};

/// Seven-point symmetric rule, exact for polynomials of degree 5.
inline constexpr std::array<TrianglePoint, 7> kTriangleDegree5{{
    {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 0.225},
    {{0.059715871789770, 0.470142064105115, 0.470142064105115}, 0.132394152788506},
    {{0.470142064105115, 0.059715871789770, 0.470142064105115}, 0.132394152788506},
    {{0.470142064105115, 0.470142064105115, 0.059715871789770}, 0.132394152788506},
    {{0.797426985353087, 0.101286507323456, 0.101286507323456}, 0.125939180544827},
    {{0.101286507323456, 0.797426985353087, 0.101286507323456}, 0.125939180544827},
    {{0.101286507323456, 0.101286507323456, 0.797426985353087}, 0.125939180544827},
}};

/// Gauss-Legendre points on [0, 1] with weights summing to one.
struct LinePoint {
  double x;
  double weight;
};

inline constexpr std::array<LinePoint, 2> kGauss2{{
    {0.21132486540518713, 0.5},
    {0.78867513459481287, 0.5},
}};

inline constexpr std::array<LinePoint, 5> kGauss5{{
    {0.046910077030668004, 0.11846344252809454},
    {0.23076534494715845, 0.23931433524968324},
    {0.5, 0.28444444444444444},
    {0.76923465505284155, 0.23931433524968324},
    {0.95308992296933200, 0.11846344252809454},
}};

}  // namespace pdbc::quadrature
