//! Known-answer vectors: one `KEYHEX PTHEX CTHEX` record per line, `#` comments.

use serde::Serialize;

use super::{Cipher, CipherParams, MasterKey};
use crate::error::{Error, Result};

/// The two published MISTY1 vectors from RFC 2994.
pub const RFC2994: &str = include_str!("../../data/misty1_rfc2994.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestVector {
    pub key: MasterKey,
    pub plaintext: u64,
    pub ciphertext: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VectorOutcome {
    pub key: String,
    pub plaintext: String,
    pub expected: String,
    pub encrypted: String,
    pub decrypts_back: bool,
    pub pass: bool,
}

fn parse_block(s: &str, bits: u32) -> Result<u64> {
    if s.len() as u32 != bits / 4 {
        return Err(Error::Parse(format!("block `{s}` must have {} hex digits", bits / 4)));
    }
    u64::from_str_radix(s, 16).map_err(|e| Error::Parse(format!("{s}: {e}")))
}

pub fn parse(params: &CipherParams, text: &str) -> Result<Vec<TestVector>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected 3 fields", n + 1)));
        }
        out.push(TestVector {
            key: MasterKey::from_hex(params, fields[0])?,
            plaintext: parse_block(fields[1], params.block_bits())?,
            ciphertext: parse_block(fields[2], params.block_bits())?,
        });
    }
    if out.is_empty() {
        return Err(Error::Parse("no test vectors found".into()));
    }
    Ok(out)
}

pub fn check(params: &CipherParams, vectors: &[TestVector]) -> Result<Vec<VectorOutcome>> {
    let digits = (params.block_bits() / 4) as usize;
    vectors
        .iter()
        .map(|v| {
            let c = Cipher::new(params.clone(), &v.key)?;
            let got = c.encrypt(v.plaintext);
            let back = c.decrypt(v.ciphertext) == v.plaintext;
            Ok(VectorOutcome {
                key: v.key.to_hex(params),
                plaintext: format!("{:0digits$x}", v.plaintext),
                expected: format!("{:0digits$x}", v.ciphertext),
                encrypted: format!("{got:0digits$x}"),
                decrypts_back: back,
                pass: got == v.ciphertext && back,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_vectors_pass() {
        let p = CipherParams::misty1();
        let v = parse(&p, RFC2994).unwrap();
        assert_eq!(v.len(), 2);
        assert!(check(&p, &v).unwrap().iter().all(|o| o.pass));
    }

    #[test]
    fn malformed_lines() {
        let p = CipherParams::misty1();
        assert!(parse(&p, "00 11").is_err());
        assert!(parse(&p, "# only a comment\n").is_err());
        assert!(parse(&p, "00112233445566778899aabbccddeeff 0123 8b1da5f56ab3d07c").is_err());
    }
}
