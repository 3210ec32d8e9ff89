// Copyright 2026 The z2stab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace z2stab {

inline constexpr const char* kVersion = "0.1.0";

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx>;
using DMat = Eigen::MatrixXcd;
using DVec = Eigen::VectorXcd;

inline constexpr cplx kImag{0.0, 1.0};

/// Raised when an integration run cannot continue (step-size underflow,
/// invariant drift beyond tolerance).
struct EvolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a requested computation would exceed the memory policy.
struct ResourceLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised on configuration-file problems; message carries the line number.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double max_abs(const DMat& m) { return m.cwiseAbs().maxCoeff(); }

inline double max_abs(const SpMat& m) {
  double v = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      v = std::max(v, std::abs(it.value()));
  return v;
}

/// FNV-1a over a byte string; used for config provenance hashes.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace z2stab
