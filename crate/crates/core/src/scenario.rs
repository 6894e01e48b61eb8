//! Scenario configuration: a sectioned TOML document (JSON also accepted)
//! whose omitted keys fall back to the reference parameter set
//! (`R₀ = 0.3 m`, `W = 0.3 m`, `σ² = -20 dB`, `m_L = 4`, `m_N = 2`,
//! `α_L = 2`, `α_N = 4`, `K = 36`).
//!
//! Parsing walks the document by hand so every error carries the key path
//! (`link.p_t`, `users.w_m`, ...) and unknown keys are rejected.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::antenna::{from_db, upa_pattern, AntennaPattern};
use crate::blockage::{los_ball, BlockProbProfile, LosBall};
use crate::channel::{integer_nakagami, LinkModel, PowerRatios, ReferenceLink};
use crate::coverage::ErgodicOptions;
use crate::error::{Error, Result};
use crate::geometry::AnnulusRegion;
use crate::montecarlo::{empirical_block_profile, AssumptionLevel, MonteCarlo};
use crate::quad;
use crate::spatial::SpatialCoverage;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionConfig {
    pub r_in_m: f64,
    pub r_out_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UsersConfig {
    /// Interferer count for random placements.
    pub k: u32,
    pub grid_n: usize,
    pub grid_spacing_m: f64,
    pub w_m: f64,
    pub orbital_d_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntennaConfig {
    pub nt: u32,
    pub nr: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkConfig {
    pub m_l: u32,
    pub m_n: u32,
    pub alpha_l: f64,
    pub alpha_n: f64,
    pub sigma2_db: f64,
    pub p_t: f64,
    pub r0_m: f64,
    pub phi0_deg: f64,
    pub psi0_deg: f64,
    /// Receiver main lobe misses the interferer plane.
    pub sidelobe_only: bool,
    /// Reference link LOS (`true`) or blocked by the user's own body.
    pub reference_los: bool,
    pub power_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LevelName {
    Orbital,
    IndependentProcesses,
    IndependentBlocking,
    LosBall,
    FixedGrid,
}

impl LevelName {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "a1" | "orbital" => LevelName::Orbital,
            "a2" | "independent" | "independent_processes" => LevelName::IndependentProcesses,
            "a3" | "independent_blocking" => LevelName::IndependentBlocking,
            "a4" | "los_ball" | "losball" => LevelName::LosBall,
            "fixed" | "grid" | "fixed_grid" => LevelName::FixedGrid,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LevelName::Orbital => "A1",
            LevelName::IndependentProcesses => "A2",
            LevelName::IndependentBlocking => "A3",
            LevelName::LosBall => "A4",
            LevelName::FixedGrid => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProfileSource {
    /// Closed-form blocking probability.
    Analytic,
    /// Tabulated from independent-process placements.
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub beta_db_from: f64,
    pub beta_db_to: f64,
    pub beta_points: usize,
    pub eta_from: f64,
    pub eta_to: f64,
    pub eta_points: usize,
    pub beta_min: f64,
    pub beta_max: f64,
    pub ergodic_points: usize,
    pub ergodic_rel_tol: f64,
    pub trials: usize,
    pub seed: u64,
    pub level: LevelName,
    pub a3_profile: ProfileSource,
    pub profile_bins: usize,
    pub profile_trials: usize,
    pub blockprob_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub region: RegionConfig,
    pub users: UsersConfig,
    pub antennas: AntennaConfig,
    pub link: LinkConfig,
    pub analysis: AnalysisConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            region: RegionConfig {
                r_in_m: 0.3,
                r_out_m: 2.1,
            },
            users: UsersConfig {
                k: 36,
                grid_n: 7,
                grid_spacing_m: 0.6,
                w_m: 0.3,
                orbital_d_m: 0.25,
            },
            antennas: AntennaConfig { nt: 1, nr: 1 },
            link: LinkConfig {
                m_l: 4,
                m_n: 2,
                alpha_l: 2.0,
                alpha_n: 4.0,
                sigma2_db: -20.0,
                p_t: 1.0,
                r0_m: 0.3,
                phi0_deg: 0.0,
                psi0_deg: 0.0,
                sidelobe_only: false,
                reference_los: true,
                power_ratio: 1.0,
            },
            analysis: AnalysisConfig {
                beta_db_from: -20.0,
                beta_db_to: 40.0,
                beta_points: 61,
                eta_from: 0.0,
                eta_to: 10.0,
                eta_points: 51,
                beta_min: 1e-4,
                beta_max: 1e6,
                ergodic_points: 2000,
                ergodic_rel_tol: 1e-3,
                trials: 100_000,
                seed: 1,
                level: LevelName::FixedGrid,
                a3_profile: ProfileSource::Analytic,
                profile_bins: 60,
                profile_trials: 20_000,
                blockprob_points: 181,
            },
        }
    }
}

/// Typed accessors over one section with path-tagged errors.
struct Section<'a> {
    name: &'static str,
    map: &'a Map<String, Value>,
}

impl<'a> Section<'a> {
    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.map.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::config(self.path(k), "unknown key"));
            }
        }
        Ok(())
    }

    fn f64(&self, key: &str, slot: &mut f64) -> Result<()> {
        if let Some(v) = self.map.get(key) {
            *slot = v
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::config(self.path(key), format!("expected a number, got {v}")))?;
        }
        Ok(())
    }

    fn uint(&self, key: &str) -> Result<Option<u64>> {
        let Some(v) = self.map.get(key) else {
            return Ok(None);
        };
        if let Some(u) = v.as_u64() {
            return Ok(Some(u));
        }
        match v.as_f64() {
            Some(x) if x >= 0.0 && x.fract() == 0.0 && x < 9.0e15 => Ok(Some(x as u64)),
            _ => Err(Error::config(
                self.path(key),
                format!("expected a non-negative integer, got {v}"),
            )),
        }
    }

    fn u32(&self, key: &str, slot: &mut u32) -> Result<()> {
        if let Some(u) = self.uint(key)? {
            *slot = u32::try_from(u).map_err(|_| Error::config(self.path(key), "value too large"))?;
        }
        Ok(())
    }

    fn usize(&self, key: &str, slot: &mut usize) -> Result<()> {
        if let Some(u) = self.uint(key)? {
            *slot = usize::try_from(u).map_err(|_| Error::config(self.path(key), "value too large"))?;
        }
        Ok(())
    }

    fn u64(&self, key: &str, slot: &mut u64) -> Result<()> {
        if let Some(u) = self.uint(key)? {
            *slot = u;
        }
        Ok(())
    }

    fn bool(&self, key: &str, slot: &mut bool) -> Result<()> {
        if let Some(v) = self.map.get(key) {
            *slot = v
                .as_bool()
                .ok_or_else(|| Error::config(self.path(key), format!("expected true/false, got {v}")))?;
        }
        Ok(())
    }

    fn str(&self, key: &str) -> Result<Option<&'a str>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(Some)
                .ok_or_else(|| Error::config(self.path(key), format!("expected a string, got {v}"))),
        }
    }

    /// Nakagami factors arrive as numbers; only integers are supported.
    fn nakagami(&self, key: &'static str, slot: &mut u32) -> Result<()> {
        let mut m = f64::from(*slot);
        self.f64(key, &mut m)?;
        *slot = integer_nakagami(key, m).map_err(|e| Error::config(self.path(key), e.to_string()))?;
        Ok(())
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be positive, got {v}")))
    }
}

impl ScenarioConfig {
    /// Reads a file; `.json` files and documents starting with `{` are JSON,
    /// everything else TOML.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if json {
            Self::from_json(&text)
        } else {
            Self::parse(&text)
        }
    }

    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return Self::from_json(text);
        }
        let table: toml::Table =
            toml::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))?;
        let value =
            serde_json::to_value(table).map_err(|e| Error::config("<document>", e.to_string()))?;
        Self::from_value(&value)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))?;
        Self::from_value(&value)
    }

    fn from_value(value: &Value) -> Result<Self> {
        let root = value
            .as_object()
            .ok_or_else(|| Error::config("<document>", "top level must be a table"))?;
        let mut cfg = Self::default();
        let empty = Map::new();
        for key in root.keys() {
            if !["region", "users", "antennas", "link", "analysis"].contains(&key.as_str()) {
                return Err(Error::config(key.clone(), "unknown section"));
            }
        }
        let section = |name: &'static str| -> Result<Section<'_>> {
            match root.get(name) {
                None => Ok(Section { name, map: &empty }),
                Some(Value::Object(map)) => Ok(Section { name, map }),
                Some(_) => Err(Error::config(name, "expected a table")),
            }
        };

        let s = section("region")?;
        s.check_keys(&["r_in_m", "r_out_m"])?;
        s.f64("r_in_m", &mut cfg.region.r_in_m)?;
        s.f64("r_out_m", &mut cfg.region.r_out_m)?;

        let s = section("users")?;
        s.check_keys(&["k", "grid_n", "grid_spacing_m", "w_m", "orbital_d_m"])?;
        s.u32("k", &mut cfg.users.k)?;
        s.usize("grid_n", &mut cfg.users.grid_n)?;
        s.f64("grid_spacing_m", &mut cfg.users.grid_spacing_m)?;
        s.f64("w_m", &mut cfg.users.w_m)?;
        s.f64("orbital_d_m", &mut cfg.users.orbital_d_m)?;

        let s = section("antennas")?;
        s.check_keys(&["nt", "nr"])?;
        s.u32("nt", &mut cfg.antennas.nt)?;
        s.u32("nr", &mut cfg.antennas.nr)?;

        let s = section("link")?;
        s.check_keys(&[
            "m_l",
            "m_n",
            "alpha_l",
            "alpha_n",
            "sigma2_db",
            "p_t",
            "r0_m",
            "phi0_deg",
            "psi0_deg",
            "sidelobe_only",
            "reference_los",
            "power_ratio",
        ])?;
        s.nakagami("m_l", &mut cfg.link.m_l)?;
        s.nakagami("m_n", &mut cfg.link.m_n)?;
        s.f64("alpha_l", &mut cfg.link.alpha_l)?;
        s.f64("alpha_n", &mut cfg.link.alpha_n)?;
        s.f64("sigma2_db", &mut cfg.link.sigma2_db)?;
        s.f64("p_t", &mut cfg.link.p_t)?;
        s.f64("r0_m", &mut cfg.link.r0_m)?;
        s.f64("phi0_deg", &mut cfg.link.phi0_deg)?;
        s.f64("psi0_deg", &mut cfg.link.psi0_deg)?;
        s.bool("sidelobe_only", &mut cfg.link.sidelobe_only)?;
        s.bool("reference_los", &mut cfg.link.reference_los)?;
        s.f64("power_ratio", &mut cfg.link.power_ratio)?;

        let s = section("analysis")?;
        s.check_keys(&[
            "beta_db_from",
            "beta_db_to",
            "beta_points",
            "eta_from",
            "eta_to",
            "eta_points",
            "beta_min",
            "beta_max",
            "ergodic_points",
            "ergodic_rel_tol",
            "trials",
            "seed",
            "level",
            "a3_profile",
            "profile_bins",
            "profile_trials",
            "blockprob_points",
        ])?;
        let a = &mut cfg.analysis;
        s.f64("beta_db_from", &mut a.beta_db_from)?;
        s.f64("beta_db_to", &mut a.beta_db_to)?;
        s.usize("beta_points", &mut a.beta_points)?;
        s.f64("eta_from", &mut a.eta_from)?;
        s.f64("eta_to", &mut a.eta_to)?;
        s.usize("eta_points", &mut a.eta_points)?;
        s.f64("beta_min", &mut a.beta_min)?;
        s.f64("beta_max", &mut a.beta_max)?;
        s.usize("ergodic_points", &mut a.ergodic_points)?;
        s.f64("ergodic_rel_tol", &mut a.ergodic_rel_tol)?;
        s.usize("trials", &mut a.trials)?;
        s.u64("seed", &mut a.seed)?;
        if let Some(l) = s.str("level")? {
            a.level = LevelName::parse(l)
                .ok_or_else(|| Error::config("analysis.level", format!("unknown level `{l}`")))?;
        }
        if let Some(p) = s.str("a3_profile")? {
            a.a3_profile = match p {
                "analytic" => ProfileSource::Analytic,
                "empirical" => ProfileSource::Empirical,
                _ => {
                    return Err(Error::config(
                        "analysis.a3_profile",
                        format!("expected `analytic` or `empirical`, got `{p}`"),
                    ))
                }
            };
        }
        s.usize("profile_bins", &mut a.profile_bins)?;
        s.usize("profile_trials", &mut a.profile_trials)?;
        s.usize("blockprob_points", &mut a.blockprob_points)?;

        cfg.validate()?;
        Ok(cfg)
    }

    /// Range checks with key paths.
    pub fn validate(&self) -> Result<()> {
        let r = &self.region;
        positive("region.r_in_m", r.r_in_m)?;
        if !(r.r_out_m > r.r_in_m) {
            return Err(Error::config(
                "region.r_out_m",
                format!("must exceed r_in_m = {}, got {}", r.r_in_m, r.r_out_m),
            ));
        }
        let u = &self.users;
        if u.grid_n == 0 {
            return Err(Error::config("users.grid_n", "must be at least 1"));
        }
        positive("users.grid_spacing_m", u.grid_spacing_m)?;
        positive("users.w_m", u.w_m)?;
        positive("users.orbital_d_m", u.orbital_d_m)?;
        // The body-clearance condition only matters when orbital placement is in use.
        if self.analysis.level == LevelName::Orbital && !(u.orbital_d_m > 0.5 * u.w_m) {
            return Err(Error::config(
                "users.orbital_d_m",
                format!("must exceed w_m/2 = {}, got {}", 0.5 * u.w_m, u.orbital_d_m),
            ));
        }
        if self.antennas.nt == 0 {
            return Err(Error::config("antennas.nt", "must be at least 1"));
        }
        if self.antennas.nr == 0 {
            return Err(Error::config("antennas.nr", "must be at least 1"));
        }
        let l = &self.link;
        positive("link.alpha_l", l.alpha_l)?;
        if !(l.alpha_n >= l.alpha_l) {
            return Err(Error::config(
                "link.alpha_n",
                format!("must be >= alpha_l = {}, got {}", l.alpha_l, l.alpha_n),
            ));
        }
        if !(0.0..=1.0).contains(&l.p_t) {
            return Err(Error::config("link.p_t", format!("must lie in [0, 1], got {}", l.p_t)));
        }
        positive("link.r0_m", l.r0_m)?;
        positive("link.power_ratio", l.power_ratio)?;
        let a = &self.analysis;
        if !(a.beta_db_to >= a.beta_db_from) {
            return Err(Error::config("analysis.beta_db_to", "must be >= beta_db_from"));
        }
        if a.beta_points == 0 {
            return Err(Error::config("analysis.beta_points", "grid must be non-empty"));
        }
        if !(a.eta_from >= 0.0) {
            return Err(Error::config("analysis.eta_from", "must be >= 0"));
        }
        if !(a.eta_to >= a.eta_from) {
            return Err(Error::config("analysis.eta_to", "must be >= eta_from"));
        }
        if a.eta_points == 0 {
            return Err(Error::config("analysis.eta_points", "grid must be non-empty"));
        }
        if !(a.beta_min >= 0.0) {
            return Err(Error::config("analysis.beta_min", "must be >= 0"));
        }
        if !(a.beta_max > a.beta_min) {
            return Err(Error::config("analysis.beta_max", "must exceed beta_min"));
        }
        if a.ergodic_points < 2 {
            return Err(Error::config("analysis.ergodic_points", "need at least 2"));
        }
        positive("analysis.ergodic_rel_tol", a.ergodic_rel_tol)?;
        if a.trials == 0 {
            return Err(Error::config("analysis.trials", "need at least one trial"));
        }
        if a.profile_bins == 0 || a.profile_trials == 0 {
            return Err(Error::config("analysis.profile_bins", "profile needs bins and trials"));
        }
        if a.blockprob_points < 2 {
            return Err(Error::config("analysis.blockprob_points", "need at least 2"));
        }
        Ok(())
    }

    pub fn region(&self) -> Result<AnnulusRegion> {
        AnnulusRegion::new(self.region.r_in_m, self.region.r_out_m)
    }

    pub fn tx(&self) -> Result<AntennaPattern> {
        upa_pattern(self.antennas.nt)
    }

    pub fn rx(&self) -> Result<AntennaPattern> {
        upa_pattern(self.antennas.nr)
    }

    /// Linear noise power.
    pub fn noise(&self) -> f64 {
        from_db(self.link.sigma2_db)
    }

    pub fn link_model(&self) -> Result<LinkModel> {
        let l = &self.link;
        LinkModel::new(l.m_l, l.m_n, l.alpha_l, l.alpha_n, self.noise(), l.p_t)?
            .with_power_ratios(PowerRatios::Uniform(l.power_ratio))
    }

    pub fn reference(&self) -> Result<ReferenceLink> {
        let link = self.link_model()?;
        let l = &self.link;
        let phi = l.phi0_deg.to_radians();
        let r = if l.reference_los {
            ReferenceLink::los(l.r0_m, phi, &link)?
        } else {
            ReferenceLink::nlos(l.r0_m, phi, &link)?
        };
        Ok(r.with_elevation(l.psi0_deg.to_radians(), l.sidelobe_only))
    }

    /// Interferer count: lattice size in fixed mode, `users.k` otherwise.
    pub fn effective_k(&self) -> Result<usize> {
        match self.analysis.level {
            LevelName::FixedGrid => Ok(crate::geometry::grid_placement(
                self.users.grid_n,
                self.users.grid_spacing_m,
                &self.region()?,
                self.users.w_m,
            )?
            .len()),
            _ => Ok(self.users.k as usize),
        }
    }

    /// Interferer density `K / |A|`, derived and never set directly.
    pub fn lambda(&self) -> Result<f64> {
        Ok(self.effective_k()? as f64 / self.region()?.area())
    }

    pub fn block_profile(&self) -> Result<BlockProbProfile> {
        BlockProbProfile::new(self.region()?, self.users.w_m, self.users.k)
    }

    pub fn los_ball(&self) -> Result<LosBall> {
        los_ball(&self.block_profile()?)
    }

    pub fn ergodic_options(&self) -> ErgodicOptions {
        ErgodicOptions {
            beta_min: self.analysis.beta_min,
            beta_max: self.analysis.beta_max,
            points: self.analysis.ergodic_points,
            rel_tol: self.analysis.ergodic_rel_tol,
            ..ErgodicOptions::default()
        }
    }

    /// Linear SINR thresholds of the configured dB grid.
    pub fn beta_grid(&self) -> Vec<f64> {
        let a = &self.analysis;
        quad::linspace(a.beta_db_from, a.beta_db_to, a.beta_points)
            .into_iter()
            .map(from_db)
            .collect()
    }

    pub fn eta_grid(&self) -> Vec<f64> {
        let a = &self.analysis;
        quad::linspace(a.eta_from, a.eta_to, a.eta_points)
    }

    pub fn assumption_level(&self, level: LevelName) -> Result<AssumptionLevel> {
        Ok(match level {
            LevelName::Orbital => AssumptionLevel::Orbital {
                d: self.users.orbital_d_m,
            },
            LevelName::IndependentProcesses => AssumptionLevel::IndependentProcesses,
            LevelName::IndependentBlocking => AssumptionLevel::IndependentBlocking {
                profile: match self.analysis.a3_profile {
                    ProfileSource::Analytic => self.block_profile()?,
                    ProfileSource::Empirical => empirical_block_profile(
                        &self.region()?,
                        self.users.w_m,
                        self.users.k as usize,
                        self.analysis.profile_bins,
                        self.analysis.profile_trials,
                        self.analysis.seed,
                    )?,
                },
            },
            LevelName::LosBall => AssumptionLevel::LosBall {
                ball: self.los_ball()?,
            },
            LevelName::FixedGrid => AssumptionLevel::FixedGrid {
                n: self.users.grid_n,
                spacing: self.users.grid_spacing_m,
            },
        })
    }

    pub fn monte_carlo(&self) -> Result<MonteCarlo> {
        Ok(MonteCarlo {
            region: self.region()?,
            k: self.users.k as usize,
            blockage_diameter: self.users.w_m,
            link: self.link_model()?,
            tx: self.tx()?,
            rx: self.rx()?,
            reference: self.reference()?,
            level: self.assumption_level(self.analysis.level)?,
        })
    }

    pub fn spatial(&self) -> Result<SpatialCoverage> {
        SpatialCoverage::new(
            self.users.k,
            &self.link_model()?,
            &self.tx()?,
            &self.rx()?,
            &self.reference()?,
            &self.region()?,
            &self.los_ball()?,
        )
    }
}
