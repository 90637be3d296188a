#include "nrchain/utm.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace nrchain::utm {
namespace {

constexpr double kSemiMajor = 6378137.0;
constexpr double kFlattening = 1.0 / 298.257223563;
constexpr double kScale = 0.9996;
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;

constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

struct Series {
    double e;            // first eccentricity
    double rectifying;   // A, radius of the rectifying sphere
    std::array<double, 6> alpha;
    std::array<double, 6> beta;
};

Series make_series() {
    const double n = kFlattening / (2.0 - kFlattening);
    const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
    Series s{};
    s.e = std::sqrt(kFlattening * (2.0 - kFlattening));
    s.rectifying = kSemiMajor / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
    s.alpha = {
        n / 2 - 2 * n2 / 3 + 5 * n3 / 16 + 41 * n4 / 180 - 127 * n5 / 288 + 7891 * n6 / 37800,
        13 * n2 / 48 - 3 * n3 / 5 + 557 * n4 / 1440 + 281 * n5 / 630 - 1983433 * n6 / 1935360,
        61 * n3 / 240 - 103 * n4 / 140 + 15061 * n5 / 26880 + 167603 * n6 / 181440,
        49561 * n4 / 161280 - 179 * n5 / 168 + 6601661 * n6 / 7257600,
        34729 * n5 / 80640 - 3418889 * n6 / 1995840,
        212378941 * n6 / 319334400,
    };
    s.beta = {
        n / 2 - 2 * n2 / 3 + 37 * n3 / 96 - n4 / 360 - 81 * n5 / 512 + 96199 * n6 / 604800,
        n2 / 48 + n3 / 15 - 437 * n4 / 1440 + 46 * n5 / 105 - 1118711 * n6 / 3870720,
        17 * n3 / 480 - 37 * n4 / 840 - 209 * n5 / 4480 + 5569 * n6 / 90720,
        4397 * n4 / 161280 - 11 * n5 / 504 - 830251 * n6 / 7257600,
        4583 * n5 / 161280 - 108847 * n6 / 3991680,
        20648693 * n6 / 638668800,
    };
    return s;
}

const Series& series() {
    static const Series s = make_series();
    return s;
}

void check_zone(int zone) {
    if (zone < 1 || zone > 60) {
        throw ProjectionError("UTM zone " + std::to_string(zone) + " outside 1..60");
    }
}

}  // namespace

int zone_for_longitude(double lon) {
    if (!(lon >= -180.0 && lon < 180.0)) {
        throw ProjectionError("longitude " + std::to_string(lon) + " outside [-180, 180)");
    }
    const int zone = static_cast<int>(std::floor((lon + 180.0) / 6.0)) + 1;
    return zone > 60 ? 60 : zone;
}

double central_meridian(int zone) {
    check_zone(zone);
    return -183.0 + 6.0 * zone;
}

UtmCoord project(double lat, double lon, int zone) {
    if (!(lat > -80.0 && lat < 84.0)) {
        throw ProjectionError("latitude " + std::to_string(lat) + " outside the UTM band (-80, 84)");
    }
    if (!(lon >= -180.0 && lon < 180.0)) {
        throw ProjectionError("longitude " + std::to_string(lon) + " outside [-180, 180)");
    }
    const Series& s = series();
    const double phi = deg2rad(lat);
    double dlam = lon - central_meridian(zone);
    dlam = std::remainder(dlam, 360.0);
    const double lam = deg2rad(dlam);

    const double sin_phi = std::sin(phi);
    const double tau = std::sinh(std::atanh(sin_phi) - s.e * std::atanh(s.e * sin_phi));
    const double xi_p = std::atan2(tau, std::cos(lam));
    const double eta_p = std::atanh(std::sin(lam) / std::sqrt(1.0 + tau * tau));

    double xi = xi_p;
    double eta = eta_p;
    for (int j = 1; j <= 6; ++j) {
        const double a = s.alpha[j - 1];
        xi += a * std::sin(2 * j * xi_p) * std::cosh(2 * j * eta_p);
        eta += a * std::cos(2 * j * xi_p) * std::sinh(2 * j * eta_p);
    }

    UtmCoord out;
    out.easting = kFalseEasting + kScale * s.rectifying * eta;
    out.northing = kScale * s.rectifying * xi;
    if (lat < 0.0) out.northing += kFalseNorthingSouth;
    return out;
}

GeoCoord unproject(double easting, double northing, int zone, Hemisphere hemisphere) {
    const Series& s = series();
    const double y = northing - (hemisphere == Hemisphere::South ? kFalseNorthingSouth : 0.0);
    const double xi = y / (kScale * s.rectifying);
    const double eta = (easting - kFalseEasting) / (kScale * s.rectifying);

    double xi_p = xi;
    double eta_p = eta;
    for (int j = 1; j <= 6; ++j) {
        const double b = s.beta[j - 1];
        xi_p -= b * std::sin(2 * j * xi) * std::cosh(2 * j * eta);
        eta_p -= b * std::cos(2 * j * xi) * std::sinh(2 * j * eta);
    }

    const double sinh_eta = std::sinh(eta_p);
    const double tau_p = std::sin(xi_p) / std::sqrt(sinh_eta * sinh_eta + std::cos(xi_p) * std::cos(xi_p));
    const double e2 = s.e * s.e;

    // Newton iteration for tau = tan(phi) from the conformal tau'.
    double tau = tau_p;
    for (int iter = 0; iter < 8; ++iter) {
        const double sigma = std::sinh(s.e * std::atanh(s.e * tau / std::sqrt(1.0 + tau * tau)));
        const double tau_i = tau * std::sqrt(1.0 + sigma * sigma) - sigma * std::sqrt(1.0 + tau * tau);
        const double step = (tau_p - tau_i) / std::sqrt(1.0 + tau_i * tau_i) *
                            (1.0 + (1.0 - e2) * tau * tau) / ((1.0 - e2) * std::sqrt(1.0 + tau * tau));
        tau += step;
        if (std::abs(step) < 1e-14) break;
    }

    GeoCoord out;
    out.lat = rad2deg(std::atan(tau));
    out.lon = central_meridian(zone) + rad2deg(std::atan2(sinh_eta, std::cos(xi_p)));
    return out;
}

}  // namespace nrchain::utm
