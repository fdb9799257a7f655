//! Exact rank of sparse integer matrices.
//!
//! Rows are eliminated fraction-free: to clear column `c` from row `r` using
//! pivot row `p` we form `p_c·r − r_c·p` (after cancelling `gcd(p_c, r_c)`)
//! and divide the result by its content. Entries therefore stay integral and
//! primitive. Pivots are chosen greedily to limit fill-in: columns with a
//! single live entry first (no arithmetic at all), then the shortest row and,
//! inside it, the column with the fewest live entries.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::int::{normalize_content, Int};

/// A sparse row: strictly increasing column indices with nonzero values.
pub type SparseRow = Vec<(u32, Int)>;

/// Builds a normalized sparse row from unsorted entries, summing duplicates
/// and dropping zeros.
pub fn sparse_row(mut entries: Vec<(u32, Int)>) -> SparseRow {
    entries.sort_by_key(|e| e.0);
    let mut out: SparseRow = Vec::with_capacity(entries.len());
    for (c, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 = last.1.add(&v),
            _ => out.push((c, v)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

/// Rank over `Q` of the matrix whose rows are `rows`, each with column
/// indices below `ncols`.
pub fn rank(rows: Vec<SparseRow>, ncols: usize) -> usize {
    Eliminator::new(rows, ncols).run()
}

struct Eliminator {
    rows: Vec<Option<SparseRow>>,
    col_rows: Vec<Vec<u32>>,
    col_count: Vec<u32>,
    heap: BinaryHeap<Reverse<(u32, u32)>>,
    singletons: Vec<u32>,
}

impl Eliminator {
    fn new(rows: Vec<SparseRow>, ncols: usize) -> Self {
        let mut col_rows = vec![Vec::new(); ncols];
        let mut col_count = vec![0u32; ncols];
        let mut heap = BinaryHeap::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            for (c, _) in row {
                col_rows[*c as usize].push(r as u32);
                col_count[*c as usize] += 1;
            }
            heap.push(Reverse((row.len() as u32, r as u32)));
        }
        let singletons = (0..ncols as u32)
            .rev()
            .filter(|c| col_count[*c as usize] == 1)
            .collect();
        Self {
            rows: rows.into_iter().map(Some).collect(),
            col_rows,
            col_count,
            heap,
            singletons,
        }
    }

    fn run(mut self) -> usize {
        let mut rank = 0;
        loop {
            if let Some(c) = self.singletons.pop() {
                if self.col_count[c as usize] != 1 {
                    continue;
                }
                let r = self.live_row_with(c).expect("count says one live row");
                self.retire(r);
                rank += 1;
                continue;
            }
            let Some(Reverse((len, r))) = self.heap.pop() else {
                break;
            };
            match &self.rows[r as usize] {
                Some(row) if row.len() as u32 == len => {}
                _ => continue,
            }
            if len == 0 {
                self.rows[r as usize] = None;
                continue;
            }
            let pivot = self.retire(r);
            let (pc, pv) = pivot
                .iter()
                .min_by_key(|(c, _)| (self.col_count[*c as usize], *c))
                .cloned()
                .expect("nonempty");
            rank += 1;
            let targets = std::mem::take(&mut self.col_rows[pc as usize]);
            for t in targets {
                let Some(row) = &self.rows[t as usize] else { continue };
                let Ok(pos) = row.binary_search_by_key(&pc, |e| e.0) else {
                    continue;
                };
                let tv = row[pos].1.clone();
                self.eliminate(t, &pivot, pc, &pv, &tv);
            }
        }
        rank
    }

    fn live_row_with(&self, c: u32) -> Option<u32> {
        self.col_rows[c as usize].iter().copied().find(|&r| {
            self.rows[r as usize]
                .as_ref()
                .is_some_and(|row| row.binary_search_by_key(&c, |e| e.0).is_ok())
        })
    }

    /// Removes row `r` from the active set and returns it.
    fn retire(&mut self, r: u32) -> SparseRow {
        let row = self.rows[r as usize].take().expect("live row");
        for (c, _) in &row {
            self.dec(*c);
        }
        row
    }

    fn dec(&mut self, c: u32) {
        let cnt = &mut self.col_count[c as usize];
        *cnt -= 1;
        if *cnt == 1 {
            self.singletons.push(c);
        }
    }

    fn inc(&mut self, c: u32, r: u32) {
        self.col_count[c as usize] += 1;
        self.col_rows[c as usize].push(r);
    }

    /// Replaces row `t` by `pv·t − tv·pivot` (reduced), clearing column `pc`.
    fn eliminate(&mut self, t: u32, pivot: &SparseRow, pc: u32, pv: &Int, tv: &Int) {
        let row = self.rows[t as usize].take().expect("live row");
        let mut out: SparseRow = Vec::with_capacity(row.len() + pivot.len());
        if pivot.len() == 1 {
            // Unit-length pivot: only the pivot column changes.
            for e in row {
                if e.0 == pc {
                    self.dec(pc);
                } else {
                    out.push(e);
                }
            }
        } else {
            let g = pv.gcd(tv);
            let (a, b) = (pv.div_exact(&g), tv.div_exact(&g));
            let (mut i, mut j) = (0, 0);
            while i < row.len() || j < pivot.len() {
                let ci = row.get(i).map_or(u32::MAX, |e| e.0);
                let cj = pivot.get(j).map_or(u32::MAX, |e| e.0);
                if ci < cj {
                    out.push((ci, row[i].1.mul(&a)));
                    i += 1;
                } else if cj < ci {
                    out.push((cj, pivot[j].1.mul(&b).neg()));
                    self.inc(cj, t);
                    j += 1;
                } else {
                    let v = row[i].1.mul_sub(&a, &pivot[j].1, &b);
                    if v.is_zero() {
                        self.dec(ci);
                    } else {
                        out.push((ci, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            let mut vals: Vec<Int> = out.iter().map(|e| e.1.clone()).collect();
            normalize_content(&mut vals);
            for (e, v) in out.iter_mut().zip(vals) {
                e.1 = v;
            }
        }
        self.heap.push(Reverse((out.len() as u32, t)));
        self.rows[t as usize] = Some(out);
    }
}
