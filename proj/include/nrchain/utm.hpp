#pragma once

#include <stdexcept>
#include <string>

namespace nrchain::utm {

// Transverse Mercator on the WGS84 ellipsoid, UTM parameters (k0 = 0.9996,
// false easting 500 km, false northing 0 / 10000 km). Implemented with the
// sixth-order Krueger series, which is accurate to well under a millimetre
// inside a zone.

struct ProjectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Hemisphere { North, South };

struct UtmCoord {
    double easting = 0.0;
    double northing = 0.0;
};

struct GeoCoord {
    double lat = 0.0;
    double lon = 0.0;
};

// Standard 6-degree zone containing `lon` (no Norway/Svalbard exceptions).
int zone_for_longitude(double lon);

double central_meridian(int zone);

// Throws ProjectionError when lat is outside (-80, 84), lon outside
// [-180, 180), or zone outside 1..60. The hemisphere follows the sign of lat.
UtmCoord project(double lat, double lon, int zone);

// Inverse of project(); used by tests and for diagnostics.
GeoCoord unproject(double easting, double northing, int zone, Hemisphere hemisphere);

}  // namespace nrchain::utm
