use serde::{Deserialize, Serialize};

use super::SearchError;

pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, SearchError> {
        if crate::model::valid_coordinates(lat, lon) {
            Ok(Self { lat, lon })
        } else {
            Err(SearchError::Coordinates { lat, lon })
        }
    }
}

/// Axis-aligned box; boxes crossing the antimeridian are not representable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub sw: GeoPoint,
    pub ne: GeoPoint,
}

impl BBox {
    pub fn new(sw: GeoPoint, ne: GeoPoint) -> Result<Self, SearchError> {
        if sw.lat > ne.lat || sw.lon > ne.lon {
            return Err(SearchError::BBox(format!(
                "south-west corner ({}, {}) is not below and left of north-east corner ({}, {})",
                sw.lat, sw.lon, ne.lat, ne.lon
            )));
        }
        Ok(Self { sw, ne })
    }

    /// Parses `swLat,swLon,neLat,neLon`.
    pub fn parse(text: &str) -> Result<Self, SearchError> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| SearchError::BBox(format!("`{text}` is not four comma-separated numbers")))?;
        let [a, b, c, d] = nums[..] else {
            return Err(SearchError::BBox(format!("`{text}` is not four comma-separated numbers")));
        };
        let corner = |lat, lon| GeoPoint::new(lat, lon).map_err(|e| SearchError::BBox(e.to_string()));
        Self::new(corner(a, b)?, corner(c, d)?)
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        self.sw.lat <= p.lat && p.lat <= self.ne.lat && self.sw.lon <= p.lon && p.lon <= self.ne.lon
    }
}

/// Great-circle distance in kilometres.
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = (b.lat - a.lat).to_radians();
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}
