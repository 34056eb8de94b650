//! JSON helpers shared by the serializable types.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rat, parse_rat};
use crate::cyclotomic::CycScalar;
use crate::error::{Error, Result};

/// An element of Q(zeta_M) as power-basis coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycJson {
    pub cyc_order: u32,
    pub coords: Vec<String>,
}

impl CycJson {
    pub fn from_scalar(c: &CycScalar) -> Self {
        let s = c.shrink();
        let mut coords: Vec<String> = s.coords().iter().map(fmt_rat).collect();
        while coords.len() > 1 && coords.last().map(|x| x == "0").unwrap_or(false) {
            coords.pop();
        }
        CycJson { cyc_order: s.order(), coords }
    }

    pub fn to_scalar(&self) -> Result<CycScalar> {
        if self.cyc_order == 0 {
            return Err(Error::Parse("cyc_order must be positive".into()));
        }
        let mut v: Vec<BigRational> = self.coords.iter().map(|s| parse_rat(s)).collect::<Result<_>>()?;
        let phi = crate::cyclotomic::CycCtx::get(self.cyc_order).phi;
        if v.len() > phi {
            // accept non-reduced polynomial input
            return Ok(CycScalar::from_poly(self.cyc_order, v));
        }
        v.resize(phi, BigRational::from_integer(0.into()));
        Ok(CycScalar::from_coords(self.cyc_order, v))
    }
}

pub fn rat_json(r: &BigRational) -> String {
    fmt_rat(r)
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_json(&s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyc_roundtrip() {
        let c = &CycScalar::e(1, 3) + &CycScalar::rational(1, crate::arith::rat(2, 5));
        let j = CycJson::from_scalar(&c);
        assert_eq!(j.to_scalar().unwrap(), c);
    }
}
