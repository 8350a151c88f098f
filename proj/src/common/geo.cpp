#include "airtrust/common/geo.hpp"

namespace airtrust::geo {

double haversine_m(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg) {
    double lat1 = deg2rad(lat1_deg);
    double lat2 = deg2rad(lat2_deg);
    double dlat = deg2rad(lat2_deg - lat1_deg);
    double dlon = deg2rad(lon2_deg - lon1_deg);
    double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
               std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) * std::sin(dlon / 2);
    double c = 2.0 * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
    return kEarthRadiusM * c;
}

LatLon advance(double lat_deg, double lon_deg, double bearing_deg, double dist_m) {
    double delta = dist_m / kEarthRadiusM;
    double theta = deg2rad(bearing_deg);
    double lat1 = deg2rad(lat_deg);
    double lon1 = deg2rad(lon_deg);

    double lat2 = std::asin(std::sin(lat1) * std::cos(delta) +
                            std::cos(lat1) * std::sin(delta) * std::cos(theta));
    double lon2 = lon1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(lat1),
                                    std::cos(delta) - std::sin(lat1) * std::sin(lat2));

    double lon_out = rad2deg(lon2);
    if (lon_out > 180.0) lon_out -= 360.0;
    if (lon_out <= -180.0) lon_out += 360.0;
    return {rad2deg(lat2), lon_out};
}

double initial_bearing_deg(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg) {
    double lat1 = deg2rad(lat1_deg);
    double lat2 = deg2rad(lat2_deg);
    double dlon = deg2rad(lon2_deg - lon1_deg);
    double y = std::sin(dlon) * std::cos(lat2);
    double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
    return wrap360(rad2deg(std::atan2(y, x)));
}

}  // namespace airtrust::geo
