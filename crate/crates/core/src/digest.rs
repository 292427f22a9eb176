//! Content digests and seed derivation.
//!
//! Every stage seed is derived from the single configured seed:
//! `child = u64::from_le_bytes(sha256("{seed}/{stage}")[0..8])`.

use sha2::{Digest, Sha256};
use std::fs;
use std::io;
use std::path::Path;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_digest(path: &Path) -> io::Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// Derives a stage-specific seed from the pipeline seed.
pub fn child_seed(seed: u64, stage: &str) -> u64 {
    let d = Sha256::digest(format!("{seed}/{stage}").as_bytes());
    let mut b = [0u8; 8];
    b.copy_from_slice(&d[..8]);
    u64::from_le_bytes(b)
}

/// Recursive digest of a directory: relative paths (sorted, `/`-separated)
/// and file contents folded into one SHA-256.
pub fn tree_digest(root: &Path) -> io::Result<String> {
    let mut files = Vec::new();
    collect_files(root, root, &mut files)?;
    files.sort();
    let mut h = Sha256::new();
    for rel in &files {
        let bytes = fs::read(root.join(rel))?;
        h.update(rel.as_bytes());
        h.update([0u8]);
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(&bytes);
    }
    Ok(hex::encode(h.finalize()))
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<String>) -> io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        if entry.file_type()?.is_dir() {
            collect_files(root, &path, out)?;
        } else {
            let rel = path.strip_prefix(root).expect("walk stays under root");
            let rel: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
            out.push(rel.join("/"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn child_seeds_differ_per_stage_and_are_stable() {
        let a = child_seed(42, "detect");
        assert_eq!(a, child_seed(42, "detect"));
        assert_ne!(a, child_seed(42, "layout"));
        assert_ne!(a, child_seed(43, "detect"));
    }

    #[test]
    fn tree_digest_tracks_content_and_names() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("sub")).unwrap();
        fs::write(dir.path().join("a.txt"), "x").unwrap();
        fs::write(dir.path().join("sub/b.txt"), "y").unwrap();
        let d1 = tree_digest(dir.path()).unwrap();
        assert_eq!(d1, tree_digest(dir.path()).unwrap());
        fs::write(dir.path().join("sub/b.txt"), "z").unwrap();
        assert_ne!(d1, tree_digest(dir.path()).unwrap());
    }
}
