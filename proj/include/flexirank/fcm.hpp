#pragma once

// Fuzzy c-means clustering and the classification-entropy validity index.
//
// Features are min-max scaled before clustering (page features mix document
// lengths in the tens of thousands with link counts near ten); centres are
// reported back in the original units.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "flexirank/error.hpp"
#include "flexirank/matrix.hpp"

namespace flexirank {

/// Column order used when clustering pages.
inline constexpr std::array<std::string_view, 7> kClusterFeatureNames = {
    "relevance", "n_images", "n_links", "n_self_links", "n_same_links", "n_lower_links", "doc_length"};

struct FcmOptions {
  std::size_t c = 4;
  double m = 2.0;
  double tol = 1e-6;
  std::size_t max_iter = 300;
  std::uint64_t seed = 42;
  /// Called with the membership matrix after every update.
  std::function<void(const Matrix& membership, std::size_t iteration)> observer;
};

struct ClusterModel {
  std::size_t c = 0;
  double m = 2.0;
  Matrix centers;         // c x d, original units
  Matrix scaled_centers;  // c x d, [0,1] units
  Matrix membership;      // n x c
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
  bool converged = false;
  MinMaxScaler scaler;
};

namespace detail {

inline Matrix random_membership(std::size_t n, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix u(n, c);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      // 53-bit uniform in (0,1]; avoids an all-zero row.
      u(i, k) = (double(rng() >> 11) + 1.0) * 0x1.0p-53;
      sum += u(i, k);
    }
    for (std::size_t k = 0; k < c; ++k) u(i, k) /= sum;
  }
  return u;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

}  // namespace detail

/// Runs FCM from an explicit initial membership matrix (n x c, rows summing to 1).
inline ClusterModel fcm_fit_from(const Matrix& data, Matrix membership, const FcmOptions& options) {
  const std::size_t n = data.rows(), d = data.cols(), c = membership.cols();
  if (c < 1) throw InvalidArgument("fcm: c must be >= 1");
  if (n < c) throw InvalidArgument("fcm: need at least c data points (n=" + std::to_string(n) +
                                   ", c=" + std::to_string(c) + ")");
  if (membership.rows() != n) throw InvalidArgument("fcm: membership rows must match data rows");
  if (!(options.m > 1.0)) throw InvalidArgument("fcm: fuzzifier m must be > 1");

  ClusterModel model;
  model.c = c;
  model.m = options.m;
  model.scaler = MinMaxScaler::fit(data);
  const Matrix x = model.scaler.transform(data);
  const double m = options.m;
  const double exponent = 2.0 / (m - 1.0);

  Matrix centers(c, d);
  Matrix dist2(n, c);
  Matrix next(n, c);
  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    // Centres: membership^m weighted means.
    for (std::size_t k = 0; k < c; ++k) {
      double denom = 0.0;
      std::vector<double> acc(d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double w = std::pow(membership(i, k), m);
        denom += w;
        for (std::size_t j = 0; j < d; ++j) acc[j] += w * x(i, j);
      }
      for (std::size_t j = 0; j < d; ++j) centers(k, j) = denom > 0.0 ? acc[j] / denom : centers(k, j);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < c; ++k) dist2(i, k) = detail::squared_distance(x.row(i), centers.row(k));

    // Memberships: inverse distance ratios; points on a centre belong to it fully.
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t zeros = 0;
      for (std::size_t k = 0; k < c; ++k) zeros += dist2(i, k) == 0.0;
      if (zeros) {
        for (std::size_t k = 0; k < c; ++k) next(i, k) = dist2(i, k) == 0.0 ? 1.0 / double(zeros) : 0.0;
        continue;
      }
      for (std::size_t k = 0; k < c; ++k) {
        double sum = 0.0;
        for (std::size_t l = 0; l < c; ++l) sum += std::pow(dist2(i, k) / dist2(i, l), exponent / 2.0);
        next(i, k) = 1.0 / sum;
      }
    }

    double objective = 0.0, delta = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < c; ++k) {
        objective += std::pow(next(i, k), m) * dist2(i, k);
        delta = std::max(delta, std::abs(next(i, k) - membership(i, k)));
      }
    std::swap(membership, next);
    model.objective_trace.push_back(objective);
    model.iterations = iter;
    if (options.observer) options.observer(membership, iter);
    if (delta < options.tol) {
      model.converged = true;
      break;
    }
  }

  model.membership = std::move(membership);
  model.scaled_centers = centers;
  model.centers = Matrix(c, d);
  for (std::size_t k = 0; k < c; ++k)
    for (std::size_t j = 0; j < d; ++j) model.centers(k, j) = model.scaler.unscale(j, centers(k, j));
  return model;
}

/// FCM with seeded uniform initial memberships (row-normalised).
inline ClusterModel fcm_fit(const Matrix& data, const FcmOptions& options) {
  if (options.c < 1) throw InvalidArgument("fcm: c must be >= 1");
  if (data.rows() < options.c)
    throw InvalidArgument("fcm: need at least c data points (n=" + std::to_string(data.rows()) +
                          ", c=" + std::to_string(options.c) + ")");
  return fcm_fit_from(data, detail::random_membership(data.rows(), options.c, options.seed), options);
}

inline ClusterModel fcm_fit(const Matrix& data, std::size_t c, double m = 2.0, double tol = 1e-6,
                            std::size_t max_iter = 300, std::uint64_t seed = 42) {
  FcmOptions o;
  o.c = c;
  o.m = m;
  o.tol = tol;
  o.max_iter = max_iter;
  o.seed = seed;
  return fcm_fit(data, o);
}

/// -(1/n) sum_i sum_k u_ik ln u_ik, with 0 ln 0 = 0.
inline double classification_entropy(const Matrix& membership) {
  if (membership.rows() == 0) return 0.0;
  double h = 0.0;
  for (double u : membership.data())
    if (u > 0.0) h -= u * std::log(u);
  return h / double(membership.rows());
}

inline double classification_entropy(const ClusterModel& model) { return classification_entropy(model.membership); }

}  // namespace flexirank
