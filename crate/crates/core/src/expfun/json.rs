//! JSON form used in report dumps: an array of
//! `{coeff_re, coeff_im, lo, hi, exponent_re, exponent_im, power}` objects,
//! with infinite endpoints written as the strings `"-inf"` / `"+inf"`.

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExpTerm, Ext, PiecewiseExp};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundRecord {
    Number(f64),
    Symbol(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff_re: f64,
    pub coeff_im: f64,
    pub lo: BoundRecord,
    pub hi: BoundRecord,
    pub exponent_re: f64,
    pub exponent_im: f64,
    #[serde(default)]
    pub power: u32,
}

fn bound_out<T: Real>(b: Ext<T>) -> BoundRecord {
    match b {
        Ext::NegInf => BoundRecord::Symbol("-inf".into()),
        Ext::PosInf => BoundRecord::Symbol("+inf".into()),
        Ext::Finite(x) => BoundRecord::Number(x.to_f64_lossy()),
    }
}

fn bound_in<T: Real>(b: &BoundRecord) -> Result<Ext<T>, String> {
    match b {
        BoundRecord::Number(x) => Ok(Ext::Finite(T::lit(*x))),
        BoundRecord::Symbol(s) if s == "-inf" => Ok(Ext::NegInf),
        BoundRecord::Symbol(s) if s == "+inf" => Ok(Ext::PosInf),
        BoundRecord::Symbol(s) => Err(format!("unknown bound {s:?}")),
    }
}

impl<T: Real> PiecewiseExp<T> {
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms()
            .iter()
            .map(|t| TermRecord {
                coeff_re: t.coeff.re.to_f64_lossy(),
                coeff_im: t.coeff.im.to_f64_lossy(),
                lo: bound_out(t.lo),
                hi: bound_out(t.hi),
                exponent_re: t.exponent.re.to_f64_lossy(),
                exponent_im: t.exponent.im.to_f64_lossy(),
                power: t.power,
            })
            .collect()
    }

    pub fn from_records(records: &[TermRecord]) -> crate::error::Result<Self> {
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            let lo = bound_in(&r.lo).map_err(crate::error::Error::InvalidTerm)?;
            let hi = bound_in(&r.hi).map_err(crate::error::Error::InvalidTerm)?;
            terms.push(ExpTerm::with_power(
                Complex::new(T::lit(r.coeff_re), T::lit(r.coeff_im)),
                lo,
                hi,
                Complex::new(T::lit(r.exponent_re), T::lit(r.exponent_im)),
                r.power,
            )?);
        }
        Ok(Self::new(terms))
    }
}

impl<T: Real> Serialize for PiecewiseExp<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for PiecewiseExp<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(deserializer)?;
        Self::from_records(&records).map_err(D::Error::custom)
    }
}
