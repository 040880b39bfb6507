//! Network configuration and its flat `key = value` file format.
//!
//! One pair per line, `#` starts a comment, keys are the [`NetworkConfig`]
//! field names. Unknown or repeated keys are errors. Omitted keys keep their
//! defaults.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::radio::RadioParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Field diameter D, meters. The field is a disk centred on the origin.
    pub diameter: f64,
    /// Number of deployed nodes L.
    pub node_count: usize,
    /// Explicit corona count; `None` derives it from `diameter / node_count`.
    pub corona_count: Option<usize>,
    /// Angular sectors in every corona except the innermost.
    pub sectors_per_corona: usize,
    /// Initial energy per node, joules.
    pub initial_energy: f64,
    /// Packet size k, bits.
    pub packet_bits: u64,
    /// Sensing radius h, meters, identical for all nodes.
    pub sensing_radius: f64,
    pub bs_position: Point,
    pub rng_seed: u64,
    /// Fraction of nodes placed in the innermost region.
    pub deployment_fraction_inner: f64,
    pub e_elec: f64,
    pub eps_fs: f64,
    pub eps_mp: f64,
    pub e_agg: f64,
    /// Crossover distance override; `None` uses `sqrt(eps_fs / eps_mp)`.
    pub d_o: Option<f64>,
    /// Desired cluster-head fraction of the LEACH baseline.
    pub leach_p: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        let radio = RadioParams::default();
        Self {
            diameter: 300.0,
            node_count: 100,
            corona_count: None,
            sectors_per_corona: 4,
            initial_energy: 0.5,
            packet_bits: 4000,
            sensing_radius: 15.0,
            bs_position: Point::ORIGIN,
            rng_seed: 1,
            deployment_fraction_inner: 0.20,
            e_elec: radio.e_elec,
            eps_fs: radio.eps_fs,
            eps_mp: radio.eps_mp,
            e_agg: radio.e_agg,
            d_o: None,
            leach_p: 0.05,
        }
    }
}

const KEYS: &[&str] = &[
    "diameter",
    "node_count",
    "corona_count",
    "sectors_per_corona",
    "initial_energy",
    "packet_bits",
    "sensing_radius",
    "bs_position",
    "rng_seed",
    "deployment_fraction_inner",
    "e_elec",
    "eps_fs",
    "eps_mp",
    "e_agg",
    "d_o",
    "leach_p",
];

impl NetworkConfig {
    pub fn radio(&self) -> RadioParams {
        let mut r = RadioParams::with_crossover(self.e_elec, self.eps_fs, self.eps_mp, self.e_agg);
        if let Some(d_o) = self.d_o {
            r.d_o = d_o;
        }
        r
    }

    pub fn field_radius(&self) -> f64 {
        self.diameter / 2.0
    }

    /// Corona count actually used: the explicit override if set, otherwise
    /// the rounded `diameter / node_count` clamped to at least one.
    pub fn effective_corona_count(&self) -> usize {
        self.corona_count
            .unwrap_or_else(|| crate::topology::corona_count(self.diameter, self.node_count))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diameter.is_finite() && self.diameter > 0.0) {
            return Err(Error::invalid(format!("diameter must be > 0, got {}", self.diameter)));
        }
        if self.node_count == 0 {
            return Err(Error::invalid("node_count must be >= 1"));
        }
        let eta = self.effective_corona_count();
        if eta == 0 {
            return Err(Error::invalid("corona_count must be >= 1"));
        }
        if eta > self.node_count {
            return Err(Error::invalid(format!(
                "corona_count {eta} exceeds node_count {}",
                self.node_count
            )));
        }
        if self.sectors_per_corona < 2 {
            return Err(Error::invalid("sectors_per_corona must be >= 2"));
        }
        if !(self.initial_energy.is_finite() && self.initial_energy > 0.0) {
            return Err(Error::invalid("initial_energy must be > 0"));
        }
        if self.packet_bits == 0 {
            return Err(Error::invalid("packet_bits must be >= 1"));
        }
        if !(self.sensing_radius.is_finite() && self.sensing_radius > 0.0) {
            return Err(Error::invalid("sensing_radius must be > 0"));
        }
        if !self.bs_position.is_finite() {
            return Err(Error::invalid("bs_position must be finite"));
        }
        let f = self.deployment_fraction_inner;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::invalid(format!(
                "deployment_fraction_inner must lie in (0, 1), got {f}"
            )));
        }
        if !(self.leach_p > 0.0 && self.leach_p <= 1.0) {
            return Err(Error::invalid("leach_p must lie in (0, 1]"));
        }
        self.radio().validate()
    }

    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = Vec::<&str>::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                message: format!("expected key = value, got {line:?}"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let Some(&canonical) = KEYS.iter().find(|k| **k == key) else {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("unknown key {key:?}"),
                });
            };
            if seen.contains(&canonical) {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("duplicate key {key:?}"),
                });
            }
            seen.push(canonical);
            cfg.set(canonical, value).map_err(|message| Error::Config {
                line: line_no,
                message,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_kv_str(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "diameter" => self.diameter = parse(key, value)?,
            "node_count" => self.node_count = parse(key, value)?,
            "corona_count" => self.corona_count = parse_auto(key, value)?,
            "sectors_per_corona" => self.sectors_per_corona = parse(key, value)?,
            "initial_energy" => self.initial_energy = parse(key, value)?,
            "packet_bits" => self.packet_bits = parse(key, value)?,
            "sensing_radius" => self.sensing_radius = parse(key, value)?,
            "bs_position" => {
                let (x, y) = value
                    .split_once(',')
                    .ok_or_else(|| format!("bs_position must be `x,y`, got {value:?}"))?;
                self.bs_position = Point::new(parse(key, x.trim())?, parse(key, y.trim())?);
            }
            "rng_seed" => self.rng_seed = parse(key, value)?,
            "deployment_fraction_inner" => self.deployment_fraction_inner = parse(key, value)?,
            "e_elec" => self.e_elec = parse(key, value)?,
            "eps_fs" => self.eps_fs = parse(key, value)?,
            "eps_mp" => self.eps_mp = parse(key, value)?,
            "e_agg" => self.e_agg = parse(key, value)?,
            "d_o" => self.d_o = parse_auto(key, value)?,
            "leach_p" => self.leach_p = parse(key, value)?,
            _ => unreachable!("key list and setter out of sync: {key}"),
        }
        Ok(())
    }

    /// Serializes every key, in the canonical order, so that
    /// `from_kv_str(to_kv_string())` reproduces the config.
    pub fn to_kv_string(&self) -> String {
        let mut s = String::new();
        let auto = |v: Option<String>| v.unwrap_or_else(|| "auto".to_string());
        let _ = writeln!(s, "diameter = {:?}", self.diameter);
        let _ = writeln!(s, "node_count = {}", self.node_count);
        let _ = writeln!(s, "corona_count = {}", auto(self.corona_count.map(|c| c.to_string())));
        let _ = writeln!(s, "sectors_per_corona = {}", self.sectors_per_corona);
        let _ = writeln!(s, "initial_energy = {:?}", self.initial_energy);
        let _ = writeln!(s, "packet_bits = {}", self.packet_bits);
        let _ = writeln!(s, "sensing_radius = {:?}", self.sensing_radius);
        let _ = writeln!(s, "bs_position = {:?},{:?}", self.bs_position.x, self.bs_position.y);
        let _ = writeln!(s, "rng_seed = {}", self.rng_seed);
        let _ = writeln!(s, "deployment_fraction_inner = {:?}", self.deployment_fraction_inner);
        let _ = writeln!(s, "e_elec = {:?}", self.e_elec);
        let _ = writeln!(s, "eps_fs = {:?}", self.eps_fs);
        let _ = writeln!(s, "eps_mp = {:?}", self.eps_mp);
        let _ = writeln!(s, "e_agg = {:?}", self.e_agg);
        let _ = writeln!(s, "d_o = {}", auto(self.d_o.map(|d| format!("{d:?}"))));
        let _ = writeln!(s, "leach_p = {:?}", self.leach_p);
        s
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse {value:?} for {key}"))
}

fn parse_auto<T: FromStr>(key: &str, value: &str) -> std::result::Result<Option<T>, String> {
    if value.eq_ignore_ascii_case("auto") {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = NetworkConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.effective_corona_count(), 3);
    }

    #[test]
    fn parses_comments_and_overrides() {
        let text = "\
# demo field
diameter = 600   # meters
node_count=250
corona_count = 4
bs_position = 10.5, -3
d_o = auto
";
        let cfg = NetworkConfig::from_kv_str(text).unwrap();
        assert_eq!(cfg.diameter, 600.0);
        assert_eq!(cfg.node_count, 250);
        assert_eq!(cfg.corona_count, Some(4));
        assert_eq!(cfg.bs_position, Point::new(10.5, -3.0));
        assert_eq!(cfg.d_o, None);
    }

    #[test]
    fn unknown_key_is_an_error() {
        let err = NetworkConfig::from_kv_str("diameter = 300\nfoo = 1\n").unwrap_err();
        match err {
            Error::Config { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("foo"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_and_malformed_lines_rejected() {
        assert!(NetworkConfig::from_kv_str("node_count = 5\nnode_count = 6").is_err());
        assert!(NetworkConfig::from_kv_str("node_count 5").is_err());
        assert!(NetworkConfig::from_kv_str("node_count = five").is_err());
        assert!(NetworkConfig::from_kv_str("bs_position = 3").is_err());
    }

    #[test]
    fn validation_failures() {
        let bad = [
            "diameter = 0",
            "node_count = 0",
            "corona_count = 0",
            "node_count = 2\ncorona_count = 3",
            "deployment_fraction_inner = 1.0",
            "initial_energy = -1",
            "sectors_per_corona = 1",
            "e_elec = 0",
        ];
        for text in bad {
            assert!(NetworkConfig::from_kv_str(text).is_err(), "{text} should fail");
        }
    }

    #[test]
    fn kv_round_trip() {
        let mut cfg = NetworkConfig::default();
        cfg.corona_count = Some(5);
        cfg.node_count = 500;
        cfg.d_o = Some(80.0);
        cfg.bs_position = Point::new(0.1, 0.2);
        let back = NetworkConfig::from_kv_str(&cfg.to_kv_string()).unwrap();
        assert_eq!(back, cfg);
    }
}
