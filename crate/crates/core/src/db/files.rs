//! On-disk database format.
//!
//! One file per cost level, `r<n>_<k>.bin`: little-endian 16-byte records,
//! bytes 0..8 = word1, bytes 8..16 = word2, sorted ascending by the masked
//! key. A sidecar `r<n>_<k>.idx` holds the masked sort key of every 1024th
//! record, so a file-backed probe needs one block read. `r<n>.manifest`
//! lists the qubit count, k_max, per-shard record counts and FNV-1a 64
//! checksums; it is written last, so an interrupted generation never leaves
//! a loadable database behind.

use std::fs::{self, File};
use std::io::{Read, Write};
use std::os::unix::fs::FileExt;
use std::path::{Path, PathBuf};

use crate::db::{aug_masks, Database, DbError, Record};
use crate::sym::thin::ThinMatrix;

/// Records per index stride / block read.
pub const INDEX_STRIDE: usize = 1024;
pub const RECORD_BYTES: usize = 16;

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

pub fn shard_path(dir: &Path, n: u8, k: usize) -> PathBuf {
    dir.join(format!("r{n}_{k}.bin"))
}

pub fn index_path(dir: &Path, n: u8, k: usize) -> PathBuf {
    dir.join(format!("r{n}_{k}.idx"))
}

pub fn manifest_path(dir: &Path, n: u8) -> PathBuf {
    dir.join(format!("r{n}.manifest"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub n: u8,
    pub k_max: usize,
    pub augmented: bool,
    pub counts: Vec<u64>,
    pub checksums: Vec<u64>,
}

impl Manifest {
    fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("qubits {}\n", self.n));
        s.push_str(&format!("k_max {}\n", self.k_max));
        s.push_str(&format!("augmented {}\n", self.augmented as u8));
        for k in 0..=self.k_max {
            s.push_str(&format!(
                "shard {k} records {} fnv1a {:016x}\n",
                self.counts[k], self.checksums[k]
            ));
        }
        s
    }

    fn parse(text: &str) -> Result<Manifest, DbError> {
        let mut n = None;
        let mut k_max = None;
        let mut augmented = false;
        let mut counts = Vec::new();
        let mut checksums = Vec::new();
        for line in text.lines() {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["qubits", v] => n = v.parse().ok(),
                ["k_max", v] => k_max = v.parse().ok(),
                ["augmented", v] => augmented = *v == "1",
                ["shard", _k, "records", c, "fnv1a", h] => {
                    counts.push(
                        c.parse()
                            .map_err(|_| DbError::Corrupt("bad manifest record count".into()))?,
                    );
                    checksums.push(
                        u64::from_str_radix(h, 16)
                            .map_err(|_| DbError::Corrupt("bad manifest checksum".into()))?,
                    );
                }
                [] => {}
                _ => return Err(DbError::Corrupt(format!("bad manifest line: {line}"))),
            }
        }
        let (n, k_max) = match (n, k_max) {
            (Some(n), Some(k)) => (n, k),
            _ => return Err(DbError::Corrupt("manifest missing qubits/k_max".into())),
        };
        if counts.len() != k_max + 1 {
            return Err(DbError::Corrupt("manifest shard list incomplete".into()));
        }
        Ok(Manifest { n, k_max, augmented, counts, checksums })
    }
}

fn encode_records(records: &[Record]) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(records.len() * RECORD_BYTES);
    for r in records {
        bytes.extend_from_slice(&r.word1.to_le_bytes());
        bytes.extend_from_slice(&r.word2.to_le_bytes());
    }
    bytes
}

fn decode_record(bytes: &[u8]) -> Record {
    Record {
        word1: u64::from_le_bytes(bytes[0..8].try_into().unwrap()),
        word2: u64::from_le_bytes(bytes[8..16].try_into().unwrap()),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DbError> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes shards, stride indexes, then the manifest.
pub fn write_database(db: &Database, dir: &Path) -> Result<Manifest, DbError> {
    fs::create_dir_all(dir)?;
    let n = db.n();
    let mut counts = Vec::new();
    let mut checksums = Vec::new();
    for k in 0..=db.k_max() {
        let records = db.shard(k);
        let bytes = encode_records(records);
        write_atomic(&shard_path(dir, n, k), &bytes)?;
        let index: Vec<Record> = records.iter().step_by(INDEX_STRIDE).map(|r| {
            let (w1, w2) = r.key(n);
            Record { word1: w1, word2: w2 }
        }).collect();
        write_atomic(&index_path(dir, n, k), &encode_records(&index))?;
        counts.push(records.len() as u64);
        checksums.push(fnv1a(&bytes));
    }
    let manifest = Manifest {
        n,
        k_max: db.k_max(),
        augmented: db.is_augmented(),
        counts,
        checksums,
    };
    write_atomic(&manifest_path(dir, n), manifest.render().as_bytes())?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path, n: u8) -> Result<Manifest, DbError> {
    let path = manifest_path(dir, n);
    let mut text = String::new();
    File::open(&path)
        .map_err(|e| {
            DbError::Corrupt(format!("cannot open manifest {}: {e}", path.display()))
        })?
        .read_to_string(&mut text)?;
    let m = Manifest::parse(&text)?;
    if m.n != n {
        return Err(DbError::Corrupt("manifest qubit count mismatch".into()));
    }
    Ok(m)
}

/// Loads every shard into memory, verifying counts and checksums.
pub fn load_ram(dir: &Path, n: u8) -> Result<Database, DbError> {
    let manifest = read_manifest(dir, n)?;
    let mut shards = Vec::with_capacity(manifest.k_max + 1);
    for k in 0..=manifest.k_max {
        let mut bytes = Vec::new();
        File::open(shard_path(dir, n, k))?.read_to_end(&mut bytes)?;
        if bytes.len() != manifest.counts[k] as usize * RECORD_BYTES {
            return Err(DbError::Corrupt(format!("shard {k} has wrong size")));
        }
        if fnv1a(&bytes) != manifest.checksums[k] {
            return Err(DbError::Corrupt(format!("shard {k} checksum mismatch")));
        }
        let records: Vec<Record> = bytes.chunks_exact(RECORD_BYTES).map(decode_record).collect();
        for w in records.windows(2) {
            if w[0].key(n) >= w[1].key(n) {
                return Err(DbError::Corrupt(format!("shard {k} is not sorted")));
            }
        }
        shards.push(records);
    }
    Ok(Database::from_parts(n, shards, manifest.augmented))
}

struct FileShard {
    file: File,
    /// Masked sort key of every 1024th record.
    index: Vec<(u64, u64)>,
    count: usize,
}

/// Query access with bulk records on disk; only the stride index is resident.
pub struct FileDatabase {
    n: u8,
    k_max: usize,
    augmented: bool,
    shards: Vec<FileShard>,
}

impl FileDatabase {
    pub fn open(dir: &Path, n: u8) -> Result<FileDatabase, DbError> {
        let manifest = read_manifest(dir, n)?;
        let mut shards = Vec::with_capacity(manifest.k_max + 1);
        for k in 0..=manifest.k_max {
            let file = File::open(shard_path(dir, n, k))?;
            let expect = manifest.counts[k] as usize * RECORD_BYTES;
            if file.metadata()?.len() as usize != expect {
                return Err(DbError::Corrupt(format!("shard {k} has wrong size")));
            }
            let mut idx_bytes = Vec::new();
            File::open(index_path(dir, n, k))?.read_to_end(&mut idx_bytes)?;
            let index: Vec<(u64, u64)> = idx_bytes
                .chunks_exact(RECORD_BYTES)
                .map(|c| {
                    let r = decode_record(c);
                    (r.word1, r.word2)
                })
                .collect();
            let expected_idx = (manifest.counts[k] as usize).div_ceil(INDEX_STRIDE);
            if index.len() != expected_idx {
                return Err(DbError::Corrupt(format!("shard {k} index has wrong size")));
            }
            shards.push(FileShard { file, index, count: manifest.counts[k] as usize });
        }
        Ok(FileDatabase { n, k_max: manifest.k_max, augmented: manifest.augmented, shards })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn is_augmented(&self) -> bool {
        self.augmented
    }

    pub fn shard_len(&self, k: usize) -> usize {
        self.shards[k].count
    }

    /// Binary search over the stride index, then one block read.
    pub fn lookup(&self, k: usize, key: (u64, u64)) -> Result<Option<Record>, DbError> {
        let shard = &self.shards[k];
        if shard.index.is_empty() {
            return Ok(None);
        }
        // last index entry <= key
        let block = match shard.index.binary_search(&key) {
            Ok(i) => i,
            Err(0) => return Ok(None),
            Err(i) => i - 1,
        };
        let start = block * INDEX_STRIDE;
        let len = INDEX_STRIDE.min(shard.count - start);
        let mut buf = vec![0u8; len * RECORD_BYTES];
        shard.file.read_exact_at(&mut buf, (start * RECORD_BYTES) as u64)?;
        let records: Vec<Record> = buf.chunks_exact(RECORD_BYTES).map(decode_record).collect();
        Ok(records
            .binary_search_by(|r| r.key(self.n).cmp(&key))
            .ok()
            .map(|i| records[i]))
    }
}

/// Uniform query interface over in-RAM and file-backed storage.
pub enum DbHandle {
    Ram(Database),
    File(FileDatabase),
}

impl DbHandle {
    pub fn open_ram(dir: &Path, n: u8) -> Result<DbHandle, DbError> {
        Ok(DbHandle::Ram(load_ram(dir, n)?))
    }

    pub fn open_file_backed(dir: &Path, n: u8) -> Result<DbHandle, DbError> {
        Ok(DbHandle::File(FileDatabase::open(dir, n)?))
    }

    pub fn n(&self) -> u8 {
        match self {
            DbHandle::Ram(db) => db.n(),
            DbHandle::File(db) => db.n(),
        }
    }

    pub fn k_max(&self) -> usize {
        match self {
            DbHandle::Ram(db) => db.k_max(),
            DbHandle::File(db) => db.k_max(),
        }
    }

    pub fn is_augmented(&self) -> bool {
        match self {
            DbHandle::Ram(db) => db.is_augmented(),
            DbHandle::File(db) => db.is_augmented(),
        }
    }

    pub fn shard_len(&self, k: usize) -> usize {
        match self {
            DbHandle::Ram(db) => db.shard(k).len(),
            DbHandle::File(db) => db.shard_len(k),
        }
    }

    pub fn lookup(&self, k: usize, thin: &ThinMatrix) -> Result<Option<Record>, DbError> {
        let key = Record::from_thin(*thin).key(self.n());
        match self {
            DbHandle::Ram(db) => Ok(db
                .shard(k)
                .binary_search_by(|r| r.key(db.n()).cmp(&key))
                .ok()
                .map(|i| db.shard(k)[i])),
            DbHandle::File(db) => db.lookup(k, key),
        }
    }

    /// Ascending probe over the cost levels.
    pub fn find(&self, thin: &ThinMatrix) -> Result<Option<(usize, Record)>, DbError> {
        for k in 0..=self.k_max() {
            if let Some(rec) = self.lookup(k, thin)? {
                return Ok(Some((k, rec)));
            }
        }
        Ok(None)
    }
}

/// Full checksum verification of the files on disk.
pub fn verify_files(dir: &Path, n: u8) -> Result<Manifest, DbError> {
    let manifest = read_manifest(dir, n)?;
    for k in 0..=manifest.k_max {
        let mut bytes = Vec::new();
        File::open(shard_path(dir, n, k))?.read_to_end(&mut bytes)?;
        if bytes.len() != manifest.counts[k] as usize * RECORD_BYTES {
            return Err(DbError::Corrupt(format!("shard {k} has wrong size")));
        }
        if fnv1a(&bytes) != manifest.checksums[k] {
            return Err(DbError::Corrupt(format!("shard {k} checksum mismatch")));
        }
    }
    Ok(manifest)
}

/// Sanity helper for tests and the CLI: is the augmentation layout masked?
pub fn masked_key_ignores_augmentation(n: u8) -> bool {
    let (m1, m2) = aug_masks(n);
    let r = Record { word1: m1, word2: m2 };
    r.key(n) == (0, 0)
}
