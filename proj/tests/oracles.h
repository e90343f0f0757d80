// Copyright 2026 The DRPO Authors.
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

// Naive reference implementations used as test oracles. They share no code
// with the library beyond the Eigen containers.
#ifndef DRPO_TESTS_ORACLES_H_
#define DRPO_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "drpo/encoder.h"
#include "drpo/types.h"

namespace oracle {

inline double sorted_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double sorted_mad(const std::vector<double>& v, double center) {
  std::vector<double> dev;
  for (double x : v) dev.push_back(std::fabs(x - center));
  return sorted_median(dev);
}

// Outlyingness of `x` against reference rows `ref` with projections given as
// a list of d x m blocks.
inline double rpo_score(const std::vector<double>& x,
                        const std::vector<std::vector<double>>& ref,
                        const std::vector<std::vector<std::vector<double>>>& proj,  // [j][c][k]
                        bool use_max, double eps, double ridge) {
  const std::size_t d = x.size();
  double acc = 0.0;
  for (const auto& u : proj) {
    const std::size_t m = u[0].size();
    // Project reference rows and the query.
    std::vector<std::vector<double>> coords(m);
    for (const auto& row : ref) {
      for (std::size_t k = 0; k < m; ++k) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += u[c][k] * row[c];
        coords[k].push_back(s);
      }
    }
    std::vector<double> q(m, 0.0);
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t c = 0; c < d; ++c) q[k] += u[c][k] * x[c];
    double dist = 0.0;
    if (m == 1) {
      const double med = sorted_median(coords[0]);
      const double mad = std::max(sorted_mad(coords[0], med), eps);
      dist = std::fabs(q[0] - med) / mad;
    } else {
      // m == 2: closed-form inverse of the covariance plus ridge.
      const std::size_t n = ref.size();
      const double mu0 = std::accumulate(coords[0].begin(), coords[0].end(), 0.0) / n;
      const double mu1 = std::accumulate(coords[1].begin(), coords[1].end(), 0.0) / n;
      double a = 0, b = 0, c = 0;
      for (std::size_t i = 0; i < n; ++i) {
        a += (coords[0][i] - mu0) * (coords[0][i] - mu0);
        b += (coords[0][i] - mu0) * (coords[1][i] - mu1);
        c += (coords[1][i] - mu1) * (coords[1][i] - mu1);
      }
      const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
      if (n > 1) {
        a /= denom;
        b /= denom;
        c /= denom;
      } else {
        a = b = c = 0.0;
      }
      a += ridge;
      c += ridge;
      const double det = a * c - b * b;
      const double r0 = q[0] - sorted_median(coords[0]);
      const double r1 = q[1] - sorted_median(coords[1]);
      const double quad = (c * r0 * r0 - 2 * b * r0 * r1 + a * r1 * r1) / det;
      dist = std::sqrt(std::max(quad, 0.0));
    }
    acc = use_max ? std::max(acc, dist) : acc + dist;
  }
  return use_max ? acc : acc / static_cast<double>(proj.size());
}

// Splits a d x (p*m) entry matrix into per-projection blocks [j][c][k].
inline std::vector<std::vector<std::vector<double>>> blocks(const Eigen::MatrixXd& entries,
                                                            int m) {
  const int p = static_cast<int>(entries.cols()) / m;
  std::vector<std::vector<std::vector<double>>> out(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    out[j].assign(static_cast<std::size_t>(entries.rows()), std::vector<double>(m));
    for (Eigen::Index c = 0; c < entries.rows(); ++c)
      for (int k = 0; k < m; ++k) out[j][c][k] = entries(c, j * m + k);
  }
  return out;
}

// P(anomaly > normal) + P(tie) / 2 by enumerating pairs.
inline double pairwise_auc(const std::vector<double>& s, const std::vector<bool>& anomaly) {
  double num = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!anomaly[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (anomaly[j]) continue;
      pairs += 1.0;
      if (s[i] > s[j]) num += 1.0;
      else if (s[i] == s[j]) num += 0.5;
    }
  }
  return num / pairs;
}

// Forward pass with explicit loops.
inline Eigen::MatrixXd mlp_forward(const std::vector<Eigen::MatrixXd>& w, double slope,
                                   const Eigen::MatrixXd& X) {
  Eigen::MatrixXd h = X;
  for (std::size_t l = 0; l < w.size(); ++l) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(h.rows(), w[l].cols());
    for (Eigen::Index i = 0; i < h.rows(); ++i)
      for (Eigen::Index k = 0; k < w[l].cols(); ++k) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < h.cols(); ++c) s += h(i, c) * w[l](c, k);
        if (l + 1 < w.size() && s < 0.0) s *= slope;
        next(i, k) = s;
      }
    h = next;
  }
  return h;
}

// Central finite-difference gradient of `f` with respect to every weight.
inline std::vector<Eigen::MatrixXd> fd_gradient(
    drpo::Encoder enc, const std::function<double(const drpo::Encoder&)>& f,
    double step = 1e-5) {
  std::vector<Eigen::MatrixXd> g;
  for (int l = 0; l < enc.num_layers(); ++l) {
    Eigen::MatrixXd gl(enc.weights()[l].rows(), enc.weights()[l].cols());
    for (Eigen::Index r = 0; r < gl.rows(); ++r)
      for (Eigen::Index c = 0; c < gl.cols(); ++c) {
        double& w = enc.mutable_weights()[l](r, c);
        const double w0 = w;
        w = w0 + step;
        const double up = f(enc);
        w = w0 - step;
        const double down = f(enc);
        w = w0;
        gl(r, c) = (up - down) / (2 * step);
      }
    g.push_back(gl);
  }
  return g;
}

// max over layers of ||a - b|| / max(||a||, ||b||, floor).
inline double relative_error(const std::vector<Eigen::MatrixXd>& a,
                             const std::vector<Eigen::MatrixXd>& b, double floor = 1e-8) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    const double scale = std::max({a[l].norm(), b[l].norm(), floor});
    worst = std::max(worst, (a[l] - b[l]).norm() / scale);
  }
  return worst;
}

}  // namespace oracle

#endif  // DRPO_TESTS_ORACLES_H_
