#pragma once

// Independent reference implementations used only by tests. These are kept
// deliberately separate from the library: areas come from the covariance
// determinant instead of eigenvalues, containment from an explicit 2x2
// inverse, and moments are accumulated in long double, so agreement between
// the two paths is meaningful.

#include <cmath>
#include <cstddef>
#include <vector>

namespace refsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Mat2 {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
};

constexpr double kRidge = 1e-9;
constexpr double kPi = 3.14159265358979323846;

inline Vec2 mean_of(const std::vector<Vec2>& pts) {
  long double sx = 0.0L, sy = 0.0L;
  for (const auto& p : pts) {
    sx += p.x;
    sy += p.y;
  }
  const auto n = static_cast<long double>(pts.size());
  return {static_cast<double>(sx / n), static_cast<double>(sy / n)};
}

inline Mat2 cov_of(const std::vector<Vec2>& pts, const Vec2& mu) {
  long double sxx = 0.0L, syy = 0.0L, sxy = 0.0L;
  for (const auto& p : pts) {
    const long double dx = p.x - mu.x;
    const long double dy = p.y - mu.y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const auto d = static_cast<long double>(pts.size()) - 1.0L;
  return {static_cast<double>(sxx / d), static_cast<double>(syy / d),
          static_cast<double>(sxy / d)};
}

// pi r^2 sigma1 sigma2 == pi r^2 sqrt(det), no eigendecomposition needed.
inline double ellipse_area(const Mat2& cov, double radius) {
  double det = cov.xx * cov.yy - cov.xy * cov.xy;
  if (det < 0.0) det = 0.0;
  return kPi * radius * radius * std::sqrt(det);
}

inline bool inside(const Vec2& mu, const Mat2& cov, double radius, const Vec2& p) {
  const double a = cov.xx + kRidge;
  const double b = cov.yy + kRidge;
  const double c = cov.xy;
  double det = a * b - c * c;
  if (det < kRidge * kRidge) det = kRidge * kRidge;
  const double dx = p.x - mu.x;
  const double dy = p.y - mu.y;
  const double d2 = (b * dx * dx - 2.0 * c * dx * dy + a * dy * dy) / det;
  return d2 <= radius * radius;
}

struct SimResult {
  bool geo_specific = false;
  Vec2 mean;
  Mat2 cov;
  std::size_t retained = 0;
  // Retained-count / area trajectory, one entry per fit.
  std::vector<std::size_t> retained_trajectory;
  std::vector<double> area_trajectory;
};

// Verbatim simulation of the published iterative procedure: loop to the
// iteration limit, check the retained ratio, fit, accept on small area,
// otherwise drop points outside the ellipse. No early exit on a fixed
// point -- the loop idles until the limit like the pseudocode does.
inline SimResult simulate(const std::vector<Vec2>& points, double max_area, double min_ratio,
                          int iteration_limit, double radius) {
  SimResult result;
  std::vector<Vec2> retained = points;
  const auto total = static_cast<double>(points.size());

  for (int iteration = 0; iteration <= iteration_limit; ++iteration) {
    if (static_cast<double>(retained.size()) / total < min_ratio) break;

    const Vec2 mu = mean_of(retained);
    const Mat2 cov = cov_of(retained, mu);
    result.mean = mu;
    result.cov = cov;
    result.retained_trajectory.push_back(retained.size());

    const double area = ellipse_area(cov, radius);
    result.area_trajectory.push_back(area);
    if (area <= max_area) {
      result.geo_specific = true;
      break;
    }

    std::vector<Vec2> kept;
    for (const auto& p : retained)
      if (inside(mu, cov, radius, p)) kept.push_back(p);
    retained = std::move(kept);
  }
  result.retained = retained.size();
  return result;
}

// Spherical law of cosines: an alternative great-circle formula for
// cross-checking Haversine values.
inline double law_of_cosines_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kRadius = 6371.0088;
  constexpr double kDeg = kPi / 180.0;
  const double p1 = lat1 * kDeg, p2 = lat2 * kDeg;
  double c = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos((lon2 - lon1) * kDeg);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return kRadius * std::acos(c);
}

}  // namespace refsim
