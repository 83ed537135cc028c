//! Content-addressed result cache: one file per fingerprint, written to a
//! temporary name and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

const MAGIC: &str = "cobarforge-cache-v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub exit: u8,
    pub body: Vec<u8>,
}

pub struct Cache {
    dir: PathBuf,
}

pub fn fingerprint(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.out"))
    }

    /// Stored entry for `key`; a corrupt entry is evicted and reported as a miss.
    pub fn lookup(&self, key: &str) -> Option<Entry> {
        let path = self.path(key);
        let raw = fs::read(&path).ok()?;
        match decode(&raw) {
            Some(e) => Some(e),
            None => {
                let _ = fs::remove_file(&path);
                None
            }
        }
    }

    pub fn store(&self, key: &str, entry: &Entry) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&encode(entry))?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(key))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

/// `MAGIC exit sha256(body)\n` followed by the body.
fn encode(e: &Entry) -> Vec<u8> {
    let mut out = format!("{MAGIC} {} {}\n", e.exit, hex::encode(Sha256::digest(&e.body))).into_bytes();
    out.extend_from_slice(&e.body);
    out
}

fn decode(raw: &[u8]) -> Option<Entry> {
    let nl = raw.iter().position(|&b| b == b'\n')?;
    let header = std::str::from_utf8(&raw[..nl]).ok()?;
    let mut parts = header.split(' ');
    if parts.next()? != MAGIC {
        return None;
    }
    let exit: u8 = parts.next()?.parse().ok()?;
    let digest = parts.next()?;
    let body = raw[nl + 1..].to_vec();
    (parts.next().is_none() && hex::encode(Sha256::digest(&body)) == digest).then_some(Entry { exit, body })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("cobarforge-cache-unit-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn round_trip_and_corruption() {
        let dir = scratch("rt");
        let c = Cache::new(&dir);
        let e = Entry { exit: 1, body: b"{\"a\":1}\n".to_vec() };
        assert!(c.lookup("k").is_none());
        c.store("k", &e).unwrap();
        assert_eq!(c.lookup("k"), Some(e));
        fs::write(dir.join("k.out"), b"cobarforge-cache-v1 0 deadbeef\nxyz").unwrap();
        assert!(c.lookup("k").is_none());
        assert!(!dir.join("k.out").exists(), "corrupt entry evicted");
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn fingerprints_differ() {
        assert_ne!(fingerprint("a"), fingerprint("b"));
        assert_eq!(fingerprint("a").len(), 64);
    }
}
