//! Complex numbers as `[re, im]` arrays. A bare number is accepted on input
//! and read as a real value.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Real(f64),
    Pair([f64; 2]),
}

pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    Ok(match Repr::deserialize(d)? {
        Repr::Real(re) => Complex64::new(re, 0.0),
        Repr::Pair([re, im]) => Complex64::new(re, im),
    })
}

/// Same encoding for fixed-size arrays of complex numbers.
pub mod array {
    use super::*;

    pub fn serialize<S: Serializer, const N: usize>(
        zs: &[Complex64; N],
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = zs.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(
        d: D,
    ) -> Result<[Complex64; N], D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        let n = pairs.len();
        let zs: Vec<Complex64> = pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        zs.try_into()
            .map_err(|_| serde::de::Error::invalid_length(n, &"fixed-length complex array"))
    }
}

/// Same encoding for optional fixed-size arrays.
pub mod option_array {
    use super::*;

    pub fn serialize<S: Serializer, const N: usize>(
        zs: &Option<[Complex64; N]>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        zs.map(|zs| zs.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(
        d: D,
    ) -> Result<Option<[Complex64; N]>, D::Error> {
        let pairs = Option::<Vec<[f64; 2]>>::deserialize(d)?;
        match pairs {
            None => Ok(None),
            Some(pairs) => {
                let n = pairs.len();
                let zs: Vec<Complex64> =
                    pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
                zs.try_into().map(Some).map_err(|_| {
                    serde::de::Error::invalid_length(n, &"fixed-length complex array")
                })
            }
        }
    }
}
