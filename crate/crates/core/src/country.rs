//! ISO 3166-1 alpha-2 country codes.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Two-letter country code, stored uppercase.
///
/// Validation is structural (exactly two ASCII letters): tweet archives
/// carry user-assigned codes such as `XK` that a strict ISO table would
/// reject.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryCode([u8; 2]);

impl CountryCode {
    pub fn new(code: &str) -> Result<Self> {
        let bytes = code.as_bytes();
        if bytes.len() != 2 || !bytes.iter().all(|b| b.is_ascii_alphabetic()) {
            return Err(Error::validation(format!(
                "country code must be two ASCII letters, got `{code}`"
            )));
        }
        Ok(CountryCode([
            bytes[0].to_ascii_uppercase(),
            bytes[1].to_ascii_uppercase(),
        ]))
    }

    pub fn as_str(&self) -> &str {
        // Always two ASCII uppercase letters by construction.
        std::str::from_utf8(&self.0).expect("ascii")
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CountryCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CountryCode::new(s)
    }
}

impl Serialize for CountryCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for CountryCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        CountryCode::new(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_case() {
        assert_eq!(CountryCode::new("it").unwrap().as_str(), "IT");
        assert_eq!(CountryCode::new("De").unwrap().as_str(), "DE");
    }

    #[test]
    fn rejects_malformed() {
        assert!(CountryCode::new("ITA").is_err());
        assert!(CountryCode::new("I").is_err());
        assert!(CountryCode::new("1T").is_err());
        assert!(CountryCode::new("").is_err());
    }

    #[test]
    fn serde_round_trip() {
        let code = CountryCode::new("FR").unwrap();
        let json = serde_json::to_string(&code).unwrap();
        assert_eq!(json, "\"FR\"");
        let back: CountryCode = serde_json::from_str(&json).unwrap();
        assert_eq!(back, code);
    }
}
