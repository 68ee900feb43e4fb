#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace quotecross {

// Position in decimal degrees. Use checked() at parse boundaries; the
// analysis code assumes values are already in range.
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    static bool in_range(double lat, double lon);
    static std::optional<GeoPoint> checked(double lat, double lon);
};

double haversine_km(GeoPoint a, GeoPoint b);

// Arithmetic mean of latitudes and of longitudes. Requires n >= 1.
GeoPoint centroid(std::span<const GeoPoint> points);

enum class GyrationMode { Planar, GreatCircle };

std::optional<GyrationMode> parse_gyration_mode(std::string_view s);
std::string_view gyration_mode_name(GyrationMode mode);

// Root mean square distance of the points to their planar centroid.
// Planar mode measures distances in degree space; great-circle mode
// measures kilometers to the same planar centroid. Requires n >= 1.
double radius_of_gyration(std::span<const GeoPoint> points, GyrationMode mode);

struct GyrationResult {
    std::string cluster_id;
    GeoPoint center;
    double radius = 0.0;
    std::size_t n = 0;
    GyrationMode mode = GyrationMode::Planar;
};

struct WeightedCentroid {
    GeoPoint center;
    std::size_t count = 0;
};

// Frequency-weighted mean of cluster centroids. Requires a nonempty input.
GeoPoint propaganda_center(std::span<const WeightedCentroid> centers);

enum class Quadrant { NE, NW, SE, SW, Coincident };

std::string_view quadrant_name(Quadrant q);

struct DirectionalSummary {
    double dlat = 0.0;  // center.lat - reference.lat
    double dlon = 0.0;
    Quadrant quadrant = Quadrant::Coincident;
};

// Signed deltas of `center` relative to `reference` plus a quadrant label.
// Components within `tolerance` of zero are treated as coincident.
DirectionalSummary compare_to_reference(GeoPoint center, GeoPoint reference,
                                        double tolerance = 1e-6);

}  // namespace quotecross
