// Nested-loop enumeration of small hidden-variable models.
#pragma once

#include "polyloc/lhv.hpp"

#include <vector>

namespace oracle {

using polyloc::LhvModel;


inline double response(const LhvModel& m, int party, int l_prev, int l_own, int o) {
  const std::size_t row = static_cast<std::size_t>(l_prev * m.cardinality(party) + l_own);
  return m.responses[static_cast<std::size_t>(party)][row][static_cast<std::size_t>(o)];
}

// Nested loops over the hidden variables of a triangle.
inline std::vector<double> nested_triangle(const LhvModel& m) {
  std::vector<double> p(64, 0.0);
  const auto& q = m.source_dists;
  for (int l0 = 0; l0 < m.cardinality(0); ++l0)
    for (int l1 = 0; l1 < m.cardinality(1); ++l1)
      for (int l2 = 0; l2 < m.cardinality(2); ++l2) {
        const double w = q[0][static_cast<std::size_t>(l0)] * q[1][static_cast<std::size_t>(l1)] *
                         q[2][static_cast<std::size_t>(l2)];
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
              p[static_cast<std::size_t>(16 * a + 4 * b + c)] +=
                  w * response(m, 0, l2, l0, a) * response(m, 1, l0, l1, b) * response(m, 2, l1, l2, c);
            }
      }
  return p;
}

inline std::vector<double> nested_square(const LhvModel& m) {
  std::vector<double> p(256, 0.0);
  const auto& q = m.source_dists;
  for (int l0 = 0; l0 < m.cardinality(0); ++l0)
    for (int l1 = 0; l1 < m.cardinality(1); ++l1)
      for (int l2 = 0; l2 < m.cardinality(2); ++l2)
        for (int l3 = 0; l3 < m.cardinality(3); ++l3) {
          const double w = q[0][static_cast<std::size_t>(l0)] * q[1][static_cast<std::size_t>(l1)] *
                           q[2][static_cast<std::size_t>(l2)] * q[3][static_cast<std::size_t>(l3)];
          for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
              for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                  p[static_cast<std::size_t>(64 * a + 16 * b + 4 * c + d)] +=
                      w * response(m, 0, l3, l0, a) * response(m, 1, l0, l1, b) * response(m, 2, l1, l2, c) *
                      response(m, 3, l2, l3, d);
                }
        }
  return p;
}

}  // namespace oracle
