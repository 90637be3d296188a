#include "nrchain/utm.hpp"

#include <gtest/gtest.h>

#include <random>

namespace utm = nrchain::utm;

namespace {

struct Reference {
    double lat, lon;
    int zone;
    double easting, northing;
};

// Values from an established geodesy library (EPSG:326xx / 327xx).
const Reference kReference[] = {
    {40.7128, -74.006, 18, 583959.3723, 4507350.9982},
    {38.9072, -77.0369, 18, 323383.1543, 4308450.7583},
    {41.8781, -87.6298, 16, 447741.9167, 4636433.6840},
    {-33.8688, 151.2093, 56, 334368.6336, 6250948.3454},
    {51.5074, -0.1278, 30, 699316.2343, 5710163.7581},
    {-45.0, 170.0, 59, 421184.6971, 5016563.2317},
};

}  // namespace

TEST(Utm, CentralMeridianOnEquator) {
    for (int zone : {1, 18, 31, 60}) {
        const auto c = utm::project(0.0, utm::central_meridian(zone), zone);
        EXPECT_NEAR(c.easting, 500000.0, 1e-6);
        EXPECT_NEAR(c.northing, 0.0, 1e-6);
    }
}

TEST(Utm, HemisphereSymmetry) {
    for (double phi : {1.0, 12.5, 33.3, 60.0, 79.0}) {
        for (double dl : {-2.5, 0.0, 1.7}) {
            const double lon = utm::central_meridian(33) + dl;
            const auto n = utm::project(phi, lon, 33);
            const auto s = utm::project(-phi, lon, 33);
            EXPECT_NEAR(n.easting, s.easting, 1e-6);
            EXPECT_NEAR(s.northing, 10000000.0 - n.northing, 1e-6);
        }
    }
}

TEST(Utm, MatchesReferenceTable) {
    for (const auto& r : kReference) {
        EXPECT_EQ(utm::zone_for_longitude(r.lon), r.zone);
        const auto c = utm::project(r.lat, r.lon, r.zone);
        EXPECT_NEAR(c.easting, r.easting, 0.01) << r.lat << "," << r.lon;
        EXPECT_NEAR(c.northing, r.northing, 0.01) << r.lat << "," << r.lon;
    }
}

TEST(Utm, RoundTripBelowTenthOfMillimetre) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lat(-79.9, 83.9);
    std::uniform_real_distribution<double> off(-3.0, 3.0);
    std::uniform_int_distribution<int> zone(1, 60);
    for (int i = 0; i < 1000; ++i) {
        const int z = zone(rng);
        const double la = lat(rng);
        const double lo = utm::central_meridian(z) + off(rng);
        const auto c = utm::project(la, lo, z);
        const auto g = utm::unproject(c.easting, c.northing, z, la < 0 ? utm::Hemisphere::South : utm::Hemisphere::North);
        const auto back = utm::project(g.lat, g.lon, z);
        EXPECT_LT(std::hypot(back.easting - c.easting, back.northing - c.northing), 1e-4);
        EXPECT_NEAR(g.lat, la, 1e-9);
    }
}

TEST(Utm, ZoneBoundaries) {
    EXPECT_EQ(utm::zone_for_longitude(-180.0), 1);
    EXPECT_EQ(utm::zone_for_longitude(-174.0), 2);
    EXPECT_EQ(utm::zone_for_longitude(179.999), 60);
    EXPECT_DOUBLE_EQ(utm::central_meridian(31), 3.0);
}

TEST(Utm, RejectsOutOfBand) {
    EXPECT_THROW(utm::project(84.0, 10.0, 32), utm::ProjectionError);
    EXPECT_THROW(utm::project(-80.0, 10.0, 32), utm::ProjectionError);
    EXPECT_THROW(utm::project(10.0, 180.0, 60), utm::ProjectionError);
    EXPECT_THROW(utm::project(10.0, 10.0, 0), utm::ProjectionError);
    EXPECT_THROW(utm::project(10.0, 10.0, 61), utm::ProjectionError);
}
