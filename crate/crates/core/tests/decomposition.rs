//! Every group element decomposes as a generator word times a local factor,
//! with word length equal to its cost; checked exhaustively for n = 2, 3.

use std::sync::atomic::{AtomicUsize, Ordering};

use cliffopt::db::files::DbHandle;
use cliffopt::db::oracle::enumerate_costs;
use cliffopt::db::{augment, bfs_generate};
use cliffopt::sym::tableau::Tableau;
use cliffopt::sym::GeneratorSet;
use cliffopt::synth::generator_decomposition;

fn tableau_from_key(n: u8, key: u64) -> Tableau {
    let two_n = 2 * n as usize;
    let rows: Vec<u16> = (0..two_n)
        .map(|i| ((key >> (i * two_n)) & ((1u64 << two_n) - 1)) as u16)
        .collect();
    Tableau::from_rows(n, &rows)
}

fn check_group(n: u8) {
    let mut db = bfs_generate(n, 0, false).unwrap();
    augment(&mut db, 0).unwrap();
    let handle = DbHandle::Ram(db);
    let gens = GeneratorSet::new(n);
    let oracle = enumerate_costs(n);
    let threads = std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1);
    for (k, level) in oracle.levels.iter().enumerate() {
        let cursor = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                let cursor = &cursor;
                let handle = &handle;
                let gens = &gens;
                scope.spawn(move || loop {
                    let i = cursor.fetch_add(1, Ordering::Relaxed);
                    if i >= level.len() {
                        break;
                    }
                    let u = tableau_from_key(n, level[i]);
                    let (indices, l) = generator_decomposition(&u, handle).unwrap();
                    assert_eq!(indices.len(), k, "word length differs from cost");
                    let mut replayed = Tableau::identity(n);
                    for &b in &indices {
                        gens.apply(&mut replayed, b);
                    }
                    assert_eq!(replayed.multiply(&l.to_tableau()), u);
                });
            }
        });
    }
}

#[test]
fn exhaustive_generator_decomposition_n2() {
    check_group(2);
}

#[test]
fn exhaustive_generator_decomposition_n3() {
    check_group(3);
}
