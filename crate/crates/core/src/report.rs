//! Shared rendering for CSV artifacts: numbers, digests, provenance headers.

use sha2::{Digest, Sha256};

/// Twelve significant digits in scientific notation; stable across runs.
pub fn fmt12(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `# key: value` comment lines placed above CSV bodies.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub entries: Vec<(String, String)>,
}

impl Provenance {
    pub fn new() -> Self {
        let mut p = Provenance::default();
        p.push("wavemol-core", env!("CARGO_PKG_VERSION"));
        p
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.entries.push((key.into(), value.into()));
        self
    }

    pub fn header(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("# {k}: {v}\n")).collect()
    }

    /// Header followed by `body`.
    pub fn wrap(&self, body: &str) -> String {
        format!("{}{body}", self.header())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(-1.137270174660903), "-1.13727017466e0");
        assert_eq!(fmt12(0.0), "0.00000000000e0");
        assert_eq!(fmt12(f64::NAN), "NaN");
    }

    #[test]
    fn digest_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn provenance_lines() {
        let mut p = Provenance::new();
        p.push("config_sha256", "ab");
        let text = p.wrap("x,y\n");
        assert!(text.starts_with("# wavemol-core: "));
        assert!(text.ends_with("# config_sha256: ab\nx,y\n"));
    }
}
