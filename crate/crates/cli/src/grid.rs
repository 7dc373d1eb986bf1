//! Parameter grids given as `start:stop:points` or comma-separated values.
//! Values accept multiples of π: `pi`, `pi/4`, `3pi/4`, `0.5*pi`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl Grid {
    pub fn linspace(start: f64, stop: f64, points: usize) -> Self {
        if points == 1 {
            return Grid(vec![start]);
        }
        Grid((0..points).map(|k| start + (stop - start) * k as f64 / (points - 1) as f64).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

pub fn parse_value(text: &str) -> Result<f64, String> {
    let s: String = text.trim().to_ascii_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse '{text}' as a number");
    let Some(at) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| bad());
    };
    let coef = s[..at].trim_end_matches('*');
    let coef = match coef {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &s[at + 2..];
    let div = match rest {
        "" => 1.0,
        r => r.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(coef * PI / div)
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let grid = match parts.as_slice() {
            [single] => Grid(single.split(',').map(parse_value).collect::<Result<_, _>>()?),
            [start, stop, points] => {
                let points: usize =
                    points.trim().parse().map_err(|_| format!("grid point count '{points}' is not an integer"))?;
                if points == 0 {
                    return Err("grid needs at least one point".into());
                }
                Grid::linspace(parse_value(start)?, parse_value(stop)?, points)
            }
            _ => return Err(format!("'{s}' is neither start:stop:points nor a comma-separated list")),
        };
        if grid.0.is_empty() {
            return Err("grid is empty".into());
        }
        if grid.0.iter().any(|v| !v.is_finite()) {
            return Err(format!("grid '{s}' has non-finite values"));
        }
        Ok(grid)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(|v| format!("{v:?}")).collect();
        f.write_str(&items.join(","))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridRepr {
    Number(f64),
    List(Vec<f64>),
    Text(String),
    Range { start: f64, stop: f64, points: usize },
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let grid = match GridRepr::deserialize(d)? {
            GridRepr::Number(v) => Grid(vec![v]),
            GridRepr::List(v) => Grid(v),
            GridRepr::Text(s) => s.parse().map_err(serde::de::Error::custom)?,
            GridRepr::Range { start, stop, points } => Grid::linspace(start, stop, points),
        };
        if grid.0.is_empty() {
            return Err(serde::de::Error::custom("grid is empty"));
        }
        Ok(grid)
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}
