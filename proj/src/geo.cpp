#include "quotecross/geo.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace quotecross {

bool GeoPoint::in_range(double lat, double lon) {
    if (!std::isfinite(lat) || !std::isfinite(lon)) return false;
    return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

std::optional<GeoPoint> GeoPoint::checked(double lat, double lon) {
    if (!in_range(lat, lon)) return std::nullopt;
    return GeoPoint{lat, lon};
}

double haversine_km(GeoPoint a, GeoPoint b) {
    constexpr double kDegToRad = 0.017453292519943295;
    constexpr double kEarthRadiusKm = 6371.0088;  // IUGG mean earth radius
    const double lat1 = a.lat * kDegToRad;
    const double lat2 = b.lat * kDegToRad;
    const double dlat = (b.lat - a.lat) * kDegToRad;
    const double dlon = (b.lon - a.lon) * kDegToRad;
    const double sl = std::sin(0.5 * dlat);
    const double so = std::sin(0.5 * dlon);
    const double h = sl * sl + std::cos(lat1) * std::cos(lat2) * so * so;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

GeoPoint centroid(std::span<const GeoPoint> points) {
    assert(!points.empty());
    double lat = 0.0;
    double lon = 0.0;
    for (const GeoPoint& p : points) {
        lat += p.lat;
        lon += p.lon;
    }
    const double n = static_cast<double>(points.size());
    return GeoPoint{lat / n, lon / n};
}

std::optional<GyrationMode> parse_gyration_mode(std::string_view s) {
    if (s == "planar") return GyrationMode::Planar;
    if (s == "great_circle") return GyrationMode::GreatCircle;
    return std::nullopt;
}

std::string_view gyration_mode_name(GyrationMode mode) {
    return mode == GyrationMode::Planar ? "planar" : "great_circle";
}

double radius_of_gyration(std::span<const GeoPoint> points, GyrationMode mode) {
    assert(!points.empty());
    // A degenerate cluster has zero spread by definition; short-circuit so
    // the result is exactly 0 even when the computed centroid of repeated
    // identical coordinates rounds a few ulps away from them.
    const bool all_same = std::all_of(points.begin(), points.end(), [&](const GeoPoint& p) {
        return p.lat == points[0].lat && p.lon == points[0].lon;
    });
    if (all_same) return 0.0;
    const GeoPoint c = centroid(points);
    double sum_sq = 0.0;
    for (const GeoPoint& p : points) {
        if (mode == GyrationMode::Planar) {
            const double dlat = p.lat - c.lat;
            const double dlon = p.lon - c.lon;
            sum_sq += dlat * dlat + dlon * dlon;
        } else {
            const double d = haversine_km(p, c);
            sum_sq += d * d;
        }
    }
    return std::sqrt(sum_sq / static_cast<double>(points.size()));
}

GeoPoint propaganda_center(std::span<const WeightedCentroid> centers) {
    assert(!centers.empty());
    double lat = 0.0;
    double lon = 0.0;
    double weight = 0.0;
    for (const WeightedCentroid& wc : centers) {
        const double w = static_cast<double>(wc.count);
        lat += wc.center.lat * w;
        lon += wc.center.lon * w;
        weight += w;
    }
    assert(weight > 0.0);
    return GeoPoint{lat / weight, lon / weight};
}

std::string_view quadrant_name(Quadrant q) {
    switch (q) {
        case Quadrant::NE: return "NE";
        case Quadrant::NW: return "NW";
        case Quadrant::SE: return "SE";
        case Quadrant::SW: return "SW";
        case Quadrant::Coincident: return "coincident";
    }
    return "coincident";
}

DirectionalSummary compare_to_reference(GeoPoint center, GeoPoint reference,
                                        double tolerance) {
    DirectionalSummary out;
    out.dlat = center.lat - reference.lat;
    out.dlon = center.lon - reference.lon;
    const bool lat_zero = std::abs(out.dlat) <= tolerance;
    const bool lon_zero = std::abs(out.dlon) <= tolerance;
    if (lat_zero && lon_zero) {
        out.quadrant = Quadrant::Coincident;
        return out;
    }
    // A component inside the tolerance band counts as positive, so a
    // displacement that is purely east reads as NE.
    const bool north = out.dlat >= -tolerance;
    const bool east = out.dlon >= -tolerance;
    out.quadrant = north ? (east ? Quadrant::NE : Quadrant::NW)
                         : (east ? Quadrant::SE : Quadrant::SW);
    return out;
}

}  // namespace quotecross
