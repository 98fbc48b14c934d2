#pragma once

#include <span>
#include <vector>

namespace hyperloc {

inline constexpr double kEarthRadiusKm = 6371.0088;

// Ridge added to covariance diagonals before inversion so that co-located
// point sets (zero covariance) still yield a usable containment test.
inline constexpr double kCovRidgeKm2 = 1e-9;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
};

bool valid_coordinates(double lat, double lon);

// Great-circle distance in km on a sphere of radius kEarthRadiusKm.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

struct ProjectedPoint {
  double x = 0.0;  // km east of the projection origin
  double y = 0.0;  // km north of the projection origin
};

// Local equirectangular projection around a fixed origin. Distortion is
// negligible at city scale; not meant for extents beyond ~200 km.
class Projection {
 public:
  explicit Projection(GeoPoint origin);

  ProjectedPoint project(const GeoPoint& p) const;
  GeoPoint unproject(const ProjectedPoint& p) const;
  const GeoPoint& origin() const { return origin_; }

 private:
  GeoPoint origin_;
  double cos_lat_;
};

// Symmetric 2x2 covariance, km^2.
struct Cov2 {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
};

// Closed-form eigendecomposition of a Cov2. var1 >= var2 >= 0 (clamped),
// theta = angle of the principal eigenvector in [0, pi).
struct Eigen2 {
  double var1 = 0.0;
  double var2 = 0.0;
  double theta = 0.0;
};

Eigen2 eigen_decompose(const Cov2& cov);

struct Gaussian2D {
  ProjectedPoint mean;
  Cov2 cov;
  Eigen2 eig;

  double sigma1() const;
  double sigma2() const;
};

// Mean and sample covariance (n-1 denominator) of >= 2 points.
// Throws std::invalid_argument on fewer.
Gaussian2D fit_gaussian(std::span<const ProjectedPoint> points);

struct CoreEllipse {
  ProjectedPoint center;
  double semi_major = 0.0;   // km, radius * sigma1
  double semi_minor = 0.0;   // km, radius * sigma2
  double orientation = 0.0;  // radians, [0, pi)
  double radius = 0.0;       // Mahalanobis radius that produced the axes

  double area() const;  // pi * semi_major * semi_minor, km^2
};

CoreEllipse core_ellipse(const Gaussian2D& g, double radius);

// Area of core_ellipse(g, radius) without building it: pi r^2 sigma1 sigma2.
double core_area_km2(const Gaussian2D& g, double radius);

// Mahalanobis distance of p from the Gaussian, ridge-regularized.
double mahalanobis(const Gaussian2D& g, const ProjectedPoint& p);

// True iff p lies inside or on the core ellipse: mahalanobis(g, p) <= radius.
bool ellipse_contains(const Gaussian2D& g, double radius, const ProjectedPoint& p);

// Order-stable pairwise summation; identical result regardless of how the
// caller parallelized the production of `values`.
double pairwise_sum(std::span<const double> values);

}  // namespace hyperloc
