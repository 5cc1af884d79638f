#pragma once

#include <cstdint>

namespace exset::detail {

// Primitive polynomial degrees, interior coefficients and initial direction
// values for Sobol' dimensions 2..21, from the Joe & Kuo (2008) tables
// ("new-joe-kuo-6"). Dimension 1 is the van der Corput sequence (all m_i = 1)
// and is handled separately.
struct SobolRow {
  int degree;               // s
  std::uint32_t coeff;      // a, interior bits of the primitive polynomial
  std::uint32_t minit[7];   // m_1..m_s (odd), zero padded
};

inline constexpr int kSobolMaxDim = 21;

inline constexpr SobolRow kSobolRows[kSobolMaxDim - 1] = {
    {1, 0, {1, 0, 0, 0, 0, 0, 0}},          // d = 2
    {2, 1, {1, 3, 0, 0, 0, 0, 0}},          // d = 3
    {3, 1, {1, 3, 1, 0, 0, 0, 0}},          // d = 4
    {3, 2, {1, 1, 1, 0, 0, 0, 0}},          // d = 5
    {4, 1, {1, 1, 3, 3, 0, 0, 0}},          // d = 6
    {4, 4, {1, 3, 5, 13, 0, 0, 0}},         // d = 7
    {5, 2, {1, 1, 5, 5, 17, 0, 0}},         // d = 8
    {5, 4, {1, 1, 5, 5, 5, 0, 0}},          // d = 9
    {5, 7, {1, 1, 7, 11, 19, 0, 0}},        // d = 10
    {5, 11, {1, 1, 5, 1, 1, 0, 0}},         // d = 11
    {5, 13, {1, 1, 1, 3, 11, 0, 0}},        // d = 12
    {5, 14, {1, 3, 5, 5, 31, 0, 0}},        // d = 13
    {6, 1, {1, 3, 3, 9, 7, 49, 0}},         // d = 14
    {6, 13, {1, 1, 1, 15, 21, 21, 0}},      // d = 15
    {6, 16, {1, 3, 1, 13, 27, 49, 0}},      // d = 16
    {6, 19, {1, 1, 1, 15, 7, 5, 0}},        // d = 17
    {6, 22, {1, 3, 1, 15, 13, 25, 0}},      // d = 18
    {6, 25, {1, 1, 5, 5, 19, 61, 0}},       // d = 19
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},     // d = 20
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},      // d = 21
};

}  // namespace exset::detail
