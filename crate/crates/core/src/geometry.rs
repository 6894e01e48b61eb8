//! Network region, user placement, and the cone-based blockage test.
//!
//! The reference receiver sits at the origin. Each user carries a transmitter
//! `X_i` and a body `B_i`, modelled as a disk of diameter `W`. A transmitter is
//! blocked when a body other than its own (or including its own, in the
//! orbital model) lies within `W/2` of it, or when its azimuth falls inside the
//! blocking cone of a body strictly closer to the receiver.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Annular network area with the reference receiver at its center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusRegion {
    r_in: f64,
    r_out: f64,
}

impl AnnulusRegion {
    pub fn new(r_in: f64, r_out: f64) -> Result<Self> {
        if !(r_in > 0.0 && r_in.is_finite()) {
            return Err(Error::invalid("r_in", format!("must be positive, got {r_in}")));
        }
        if !(r_out > r_in && r_out.is_finite()) {
            return Err(Error::invalid(
                "r_out",
                format!("must exceed r_in = {r_in}, got {r_out}"),
            ));
        }
        Ok(Self { r_in, r_out })
    }

    pub fn r_in(&self) -> f64 {
        self.r_in
    }

    pub fn r_out(&self) -> f64 {
        self.r_out
    }

    pub fn area(&self) -> f64 {
        PI * (self.r_out * self.r_out - self.r_in * self.r_in)
    }

    pub fn contains(&self, p: PlanarPoint) -> bool {
        let r = p.radius();
        r >= self.r_in && r <= self.r_out
    }

    /// Fraction of the area lying within radius `r` of the origin.
    pub fn radial_cdf(&self, r: f64) -> f64 {
        let r = r.clamp(self.r_in, self.r_out);
        (r * r - self.r_in * self.r_in) / (self.r_out * self.r_out - self.r_in * self.r_in)
    }
}

/// Point in the horizontal plane, metres.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const ORIGIN: PlanarPoint = PlanarPoint { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, azimuth: f64) -> Self {
        let (s, c) = azimuth.sin_cos();
        Self {
            x: radius * c,
            y: radius * s,
        }
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Azimuth in `(-π, π]`.
    pub fn azimuth(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn distance(&self, other: PlanarPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            x: c * self.x - s * self.y,
            y: s * self.x + c * self.y,
        }
    }

    pub fn offset(&self, distance: f64, direction: f64) -> Self {
        let (s, c) = direction.sin_cos();
        Self {
            x: self.x + distance * c,
            y: self.y + distance * s,
        }
    }
}

/// Wraps an angle difference into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}

/// Interfering transmitters and the bodies that may block them.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSet {
    transmitters: Vec<PlanarPoint>,
    blockages: Vec<PlanarPoint>,
    blockage_diameter: f64,
    colocated: bool,
}

impl UserSet {
    pub fn new(
        transmitters: Vec<PlanarPoint>,
        blockages: Vec<PlanarPoint>,
        blockage_diameter: f64,
    ) -> Result<Self> {
        if transmitters.len() != blockages.len() {
            return Err(Error::invalid(
                "blockages",
                format!(
                    "{} transmitters but {} blockages",
                    transmitters.len(),
                    blockages.len()
                ),
            ));
        }
        if !(blockage_diameter > 0.0 && blockage_diameter.is_finite()) {
            return Err(Error::invalid(
                "blockage_diameter",
                format!("must be positive, got {blockage_diameter}"),
            ));
        }
        Ok(Self {
            transmitters,
            blockages,
            blockage_diameter,
            colocated: false,
        })
    }

    /// Fixed-geometry users whose bodies coincide with their transmitters.
    pub fn colocated(points: Vec<PlanarPoint>, blockage_diameter: f64) -> Result<Self> {
        let mut set = Self::new(points.clone(), points, blockage_diameter)?;
        set.colocated = true;
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.transmitters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmitters.is_empty()
    }

    pub fn transmitters(&self) -> &[PlanarPoint] {
        &self.transmitters
    }

    pub fn blockages(&self) -> &[PlanarPoint] {
        &self.blockages
    }

    pub fn blockage_diameter(&self) -> f64 {
        self.blockage_diameter
    }

    pub fn is_colocated(&self) -> bool {
        self.colocated
    }

    /// Rotates every point about the receiver.
    pub fn rotated(&self, angle: f64) -> Self {
        Self {
            transmitters: self.transmitters.iter().map(|p| p.rotated(angle)).collect(),
            blockages: self.blockages.iter().map(|p| p.rotated(angle)).collect(),
            ..self.clone()
        }
    }
}

/// Angular wedge behind a body, apex at the body center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockingCone {
    /// Index of the body in the originating blockage list.
    pub blockage: usize,
    pub apex_distance: f64,
    pub azimuth: f64,
    pub half_angle: f64,
    /// True when the body overlaps the receiver and the half-angle was clamped to π/2.
    pub clamped: bool,
}

impl BlockingCone {
    pub fn new(blockage: usize, center: PlanarPoint, diameter: f64) -> Self {
        let apex_distance = center.radius();
        let ratio = diameter / (2.0 * apex_distance);
        let (half_angle, clamped) = if ratio >= 1.0 {
            (FRAC_PI_2, true)
        } else {
            (ratio.asin(), false)
        };
        Self {
            blockage,
            apex_distance,
            azimuth: center.azimuth(),
            half_angle,
            clamped,
        }
    }

    /// Whether azimuth `phi` lies in the closed wedge.
    pub fn covers(&self, phi: f64) -> bool {
        wrap_angle(phi - self.azimuth).abs() <= self.half_angle
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockageReport {
    pub blocked: Vec<bool>,
    /// Blocking cones sorted by apex distance.
    pub cones: Vec<BlockingCone>,
    /// Set when at least one body overlaps the receiver.
    pub clamped: bool,
}

impl BlockageReport {
    pub fn blocked_count(&self) -> usize {
        self.blocked.iter().filter(|&&b| b).count()
    }

    pub fn los_flags(&self) -> Vec<bool> {
        self.blocked.iter().map(|b| !b).collect()
    }
}

/// Bodies prepared for repeated blockage queries.
#[derive(Debug, Clone)]
pub struct BlockingField<'a> {
    blockages: &'a [PlanarPoint],
    diameter: f64,
    cones: Vec<BlockingCone>,
}

impl<'a> BlockingField<'a> {
    pub fn new(blockages: &'a [PlanarPoint], diameter: f64) -> Result<Self> {
        if let Some((i, _)) = blockages
            .iter()
            .enumerate()
            .find(|(_, b)| !(b.radius() > 0.0))
        {
            return Err(Error::invalid(
                "blockages",
                format!("blockage {i} sits on the receiver"),
            ));
        }
        let mut cones: Vec<BlockingCone> = blockages
            .iter()
            .enumerate()
            .map(|(i, &b)| BlockingCone::new(i, b, diameter))
            .collect();
        cones.sort_by(|a, b| a.apex_distance.total_cmp(&b.apex_distance));
        Ok(Self {
            blockages,
            diameter,
            cones,
        })
    }

    pub fn cones(&self) -> &[BlockingCone] {
        &self.cones
    }

    /// Blockage test for a transmitter at `point`, ignoring body `skip`.
    pub fn is_blocked(&self, point: PlanarPoint, skip: Option<usize>) -> bool {
        let half_w = 0.5 * self.diameter;
        let near = self
            .blockages
            .iter()
            .enumerate()
            .any(|(j, &b)| Some(j) != skip && point.distance(b) <= half_w);
        if near {
            return true;
        }
        let r = point.radius();
        let phi = point.azimuth();
        self.cones
            .iter()
            .take_while(|c| c.apex_distance < r)
            .any(|c| Some(c.blockage) != skip && c.covers(phi))
    }
}

/// Determines which transmitters are blocked.
///
/// With `include_self = false` body `i` is never tested against transmitter
/// `i` (fixed geometry, bodies co-located with transmitters). With
/// `include_self = true` every body is tested, which gives self-blocking in the
/// orbital model.
pub fn blocked_set(users: &UserSet, include_self: bool) -> Result<BlockageReport> {
    let field = BlockingField::new(&users.blockages, users.blockage_diameter)?;
    let blocked = users
        .transmitters
        .iter()
        .enumerate()
        .map(|(i, &x)| field.is_blocked(x, if include_self { None } else { Some(i) }))
        .collect();
    let clamped = field.cones.iter().any(|c| c.clamped);
    Ok(BlockageReport {
        blocked,
        cones: field.cones,
        clamped,
    })
}

/// Points of an `n × n` square lattice centred on the receiver whose radius
/// falls inside the annulus, in row-major order (rows by increasing `y`,
/// columns by increasing `x`). Bodies are co-located with transmitters.
///
/// An empty set is returned when no lattice point lands in the annulus.
pub fn grid_placement(
    n: usize,
    spacing: f64,
    region: &AnnulusRegion,
    blockage_diameter: f64,
) -> Result<UserSet> {
    if n == 0 {
        return Err(Error::invalid("n", "lattice needs at least one point per side"));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::invalid("spacing", format!("must be positive, got {spacing}")));
    }
    let offset = (n as f64 - 1.0) / 2.0;
    // Radii are compared with a small slack so lattice points that land on
    // the boundary analytically are not lost to rounding.
    let slack = 1e-9 * region.r_out;
    let mut points = Vec::new();
    for row in 0..n {
        for col in 0..n {
            let p = PlanarPoint::new(
                (col as f64 - offset) * spacing,
                (row as f64 - offset) * spacing,
            );
            let r = p.radius();
            if r >= region.r_in - slack && r <= region.r_out + slack {
                points.push(p);
            }
        }
    }
    UserSet::colocated(points, blockage_diameter)
}

/// `count` points i.i.d. uniform over the annulus.
pub fn sample_bpp<R: Rng + ?Sized>(
    count: usize,
    region: &AnnulusRegion,
    rng: &mut R,
) -> Vec<PlanarPoint> {
    let r_in2 = region.r_in * region.r_in;
    let span = region.r_out * region.r_out - r_in2;
    (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            let phi: f64 = rng.random::<f64>() * TAU;
            PlanarPoint::from_polar((r_in2 + u * span).sqrt(), phi)
        })
        .collect()
}

/// Places each transmitter uniformly on a circle of radius `d` around its body.
/// Positions outside the annulus are kept as drawn.
pub fn orbital_positions<R: Rng + ?Sized>(
    blockages: &[PlanarPoint],
    d: f64,
    blockage_diameter: f64,
    rng: &mut R,
) -> Result<Vec<PlanarPoint>> {
    if !(d > 0.5 * blockage_diameter) || !d.is_finite() {
        return Err(Error::invalid(
            "orbital_radius",
            format!("must exceed W/2 = {}, got {d}", 0.5 * blockage_diameter),
        ));
    }
    Ok(blockages
        .iter()
        .map(|b| b.offset(d, rng.random::<f64>() * TAU))
        .collect())
}

#[derive(Debug, Serialize, Deserialize)]
struct PlacementRow {
    index: usize,
    x_m: f64,
    y_m: f64,
    role: String,
}

/// Writes placements as CSV rows `index,x_m,y_m,role` with role `tx` or `blockage`.
pub fn placements_to_csv(users: &UserSet) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let rows = users
        .transmitters
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p, "tx"))
        .chain(
            users
                .blockages
                .iter()
                .enumerate()
                .map(|(i, p)| (i, p, "blockage")),
        );
    for (index, p, role) in rows {
        w.serialize(PlacementRow {
            index,
            x_m: p.x,
            y_m: p.y,
            role: role.to_string(),
        })
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Reads placements written by [`placements_to_csv`]. Rows may appear in any
/// order; indices must cover `0..K` once per role.
pub fn placements_from_csv(text: &str, blockage_diameter: f64) -> Result<UserSet> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut tx: Vec<Option<PlanarPoint>> = Vec::new();
    let mut bl: Vec<Option<PlanarPoint>> = Vec::new();
    for (line, row) in reader.deserialize::<PlacementRow>().enumerate() {
        let row = row.map_err(|e| Error::config(format!("row {}", line + 1), e.to_string()))?;
        let slot = match row.role.as_str() {
            "tx" => &mut tx,
            "blockage" => &mut bl,
            other => {
                return Err(Error::config(
                    format!("row {}.role", line + 1),
                    format!("expected `tx` or `blockage`, got `{other}`"),
                ))
            }
        };
        if slot.len() <= row.index {
            slot.resize(row.index + 1, None);
        }
        if slot[row.index].is_some() {
            return Err(Error::config(
                format!("row {}.index", line + 1),
                format!("duplicate {} index {}", row.role, row.index),
            ));
        }
        slot[row.index] = Some(PlanarPoint::new(row.x_m, row.y_m));
    }
    let collect = |v: Vec<Option<PlanarPoint>>, role: &str| -> Result<Vec<PlanarPoint>> {
        v.into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| Error::config("index", format!("missing {role} {i}"))))
            .collect()
    };
    let tx = collect(tx, "tx")?;
    let bl = collect(bl, "blockage")?;
    let colocated = tx == bl;
    let mut set = UserSet::new(tx, bl, blockage_diameter)?;
    set.colocated = colocated;
    Ok(set)
}
