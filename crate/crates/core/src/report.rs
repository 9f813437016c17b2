//! Shared output pieces. Exact counts are written as JSON numbers when they
//! fit in 64 bits and as decimal strings otherwise; both forms are accepted
//! on input.

use serde::{Deserialize, Serialize};

use crate::gf::FieldCtx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub p: u32,
    pub k: u32,
    pub q: u32,
}

impl FieldInfo {
    pub fn of(f: &FieldCtx) -> Self {
        FieldInfo {
            p: f.p(),
            k: f.k(),
            q: f.q(),
        }
    }
}

pub mod big {
    use num_bigint::BigUint;
    use num_traits::ToPrimitive;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(u64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        match v.to_u64() {
            Some(n) => n.serialize(s),
            None => v.to_string().serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(n) => Ok(n.into()),
            Repr::Text(t) => t.parse().map_err(D::Error::custom),
        }
    }
}

pub mod big_map {
    use std::collections::BTreeMap;

    use num_bigint::BigUint;
    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    struct Wrapped(#[serde(with = "super::big")] BigUint);

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<String, BigUint>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        struct One<'a>(&'a BigUint);
        impl serde::Serialize for One<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                super::big::serialize(self.0, s)
            }
        }
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(k, &One(v))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<String, BigUint>, D::Error> {
        let raw = BTreeMap::<String, Wrapped>::deserialize(d)?;
        Ok(raw.into_iter().map(|(k, v)| (k, v.0)).collect())
    }
}
