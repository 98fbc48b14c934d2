#include "hyperloc/geomath.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hyperloc {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

bool valid_coordinates(double lat, double lon) {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
         lon >= -180.0 && lon <= 180.0;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlat = (b.lat - a.lat) * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;

  const double sin_lat = std::sin(dlat / 2.0);
  const double sin_lon = std::sin(dlon / 2.0);
  double h = sin_lat * sin_lat + std::cos(lat1) * std::cos(lat2) * sin_lon * sin_lon;
  if (h > 1.0) h = 1.0;
  if (h < 0.0) h = 0.0;
  return 2.0 * kEarthRadiusKm * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

Projection::Projection(GeoPoint origin)
    : origin_(origin), cos_lat_(std::cos(origin.lat * kDegToRad)) {}

ProjectedPoint Projection::project(const GeoPoint& p) const {
  return {kEarthRadiusKm * cos_lat_ * (p.lon - origin_.lon) * kDegToRad,
          kEarthRadiusKm * (p.lat - origin_.lat) * kDegToRad};
}

GeoPoint Projection::unproject(const ProjectedPoint& p) const {
  return {origin_.lat + p.y / (kEarthRadiusKm * kDegToRad),
          origin_.lon + p.x / (kEarthRadiusKm * cos_lat_ * kDegToRad)};
}

Eigen2 eigen_decompose(const Cov2& cov) {
  const double half_trace = 0.5 * (cov.xx + cov.yy);
  const double half_diff = 0.5 * (cov.xx - cov.yy);
  const double disc = std::sqrt(half_diff * half_diff + cov.xy * cov.xy);

  Eigen2 eig;
  eig.var1 = half_trace + disc;
  eig.var2 = half_trace - disc;
  if (eig.var1 < 0.0) eig.var1 = 0.0;  // rounding can nudge a PSD matrix negative
  if (eig.var2 < 0.0) eig.var2 = 0.0;

  // Eigenvector for var1 of [[xx, xy], [xy, yy]] is (var1 - yy, xy).
  const double vx = eig.var1 - cov.yy;
  const double vy = cov.xy;
  if (vx == 0.0 && vy == 0.0) {
    eig.theta = cov.yy > cov.xx ? std::numbers::pi / 2.0 : 0.0;
  } else {
    double theta = std::atan2(vy, vx);
    if (theta < 0.0) theta += std::numbers::pi;
    if (theta >= std::numbers::pi) theta -= std::numbers::pi;
    eig.theta = theta;
  }
  return eig;
}

double Gaussian2D::sigma1() const { return std::sqrt(eig.var1); }
double Gaussian2D::sigma2() const { return std::sqrt(eig.var2); }

Gaussian2D fit_gaussian(std::span<const ProjectedPoint> points) {
  if (points.size() < 2) throw std::invalid_argument("fit_gaussian: insufficient points (need >= 2)");

  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& p : points) {
    sx += p.x;
    sy += p.y;
  }

  Gaussian2D g;
  g.mean = {sx / n, sy / n};

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = p.x - g.mean.x;
    const double dy = p.y - g.mean.y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  g.cov = {sxx / (n - 1.0), syy / (n - 1.0), sxy / (n - 1.0)};
  g.eig = eigen_decompose(g.cov);
  return g;
}

double CoreEllipse::area() const { return std::numbers::pi * semi_major * semi_minor; }

CoreEllipse core_ellipse(const Gaussian2D& g, double radius) {
  CoreEllipse e;
  e.center = g.mean;
  e.semi_major = radius * g.sigma1();
  e.semi_minor = radius * g.sigma2();
  e.orientation = g.eig.theta;
  e.radius = radius;
  return e;
}

double core_area_km2(const Gaussian2D& g, double radius) {
  return std::numbers::pi * radius * radius * g.sigma1() * g.sigma2();
}

double mahalanobis(const Gaussian2D& g, const ProjectedPoint& p) {
  const double a = g.cov.xx + kCovRidgeKm2;
  const double b = g.cov.yy + kCovRidgeKm2;
  const double c = g.cov.xy;
  double det = a * b - c * c;
  if (det < kCovRidgeKm2 * kCovRidgeKm2) det = kCovRidgeKm2 * kCovRidgeKm2;

  const double dx = p.x - g.mean.x;
  const double dy = p.y - g.mean.y;
  const double d2 = (b * dx * dx - 2.0 * c * dx * dy + a * dy * dy) / det;
  return d2 > 0.0 ? std::sqrt(d2) : 0.0;
}

bool ellipse_contains(const Gaussian2D& g, double radius, const ProjectedPoint& p) {
  return mahalanobis(g, p) <= radius;
}

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace hyperloc
