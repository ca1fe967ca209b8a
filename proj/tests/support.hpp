#pragma once

#include <cstdint>
#include <vector>

#include "dtc/state_vector.hpp"
#include "oracles.hpp"

// Conversions between library states and the dense oracle vectors.
inline oracle::Vec to_dense(const dtc::StateVector& s) {
  oracle::Vec v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t i = 0; i < s.dim(); ++i) {
    v[static_cast<Eigen::Index>(i)] = s[i];
  }
  return v;
}

inline dtc::StateVector from_dense(int n, const oracle::Vec& v) {
  return dtc::StateVector::from_amplitudes(n, std::vector<dtc::Complex>(v.data(), v.data() + v.size()));
}

// Overlap modulus, insensitive to global phase.
inline double fidelity(const oracle::Vec& a, const oracle::Vec& b) {
  return std::abs(a.dot(b));
}

// max_i |a_i - b_i| after removing the relative global phase.
inline double phase_aligned_distance(const oracle::Vec& a, const oracle::Vec& b) {
  const oracle::C overlap = a.dot(b);
  const oracle::C phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : oracle::C(1.0);
  return (a * phase - b).cwiseAbs().maxCoeff();
}
