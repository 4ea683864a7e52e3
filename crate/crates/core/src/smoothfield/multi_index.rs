//! Dense multi-index tables over the simplex `|α| ≤ order`.
//!
//! Tables are built once per `(num_vars, order)` and shared through a
//! process-wide cache; all jets with the same shape point at the same table.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Multi-indices in graded-lexicographic order together with the
/// precomputed product and differentiation maps.
#[derive(Debug)]
pub struct MultiIndexTable {
    num_vars: usize,
    order: usize,
    indices: Vec<Vec<u8>>,
    lookup: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)` with `α_i + α_j = α_k`.
    products: Vec<(u32, u32, u32)>,
    /// `shift_down[var][k]` = index of `α_k − e_var`, when `α_k[var] > 0`.
    shift_down: Vec<Vec<Option<u32>>>,
    degree_start: Vec<usize>,
}

fn simplex(num_vars: usize, degree: usize) -> Vec<Vec<u8>> {
    // graded lex: x0 is the most significant variable
    if num_vars == 0 {
        return if degree == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=degree).rev() {
        for mut rest in simplex(num_vars - 1, degree - first) {
            let mut idx = Vec::with_capacity(num_vars);
            idx.push(first as u8);
            idx.append(&mut rest);
            out.push(idx);
        }
    }
    out
}

impl MultiIndexTable {
    fn build(num_vars: usize, order: usize) -> Self {
        let mut indices = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for d in 0..=order {
            degree_start.push(indices.len());
            indices.extend(simplex(num_vars, d));
        }
        degree_start.push(indices.len());
        let lookup: HashMap<Vec<u8>, usize> = indices
            .iter()
            .enumerate()
            .map(|(k, a)| (a.clone(), k))
            .collect();

        let mut products = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            let da: usize = a.iter().map(|&x| x as usize).sum();
            for (j, b) in indices.iter().enumerate() {
                let db: usize = b.iter().map(|&x| x as usize).sum();
                if da + db > order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, lookup[&sum] as u32));
            }
        }

        let shift_down = (0..num_vars)
            .map(|v| {
                indices
                    .iter()
                    .map(|a| {
                        if a[v] == 0 {
                            None
                        } else {
                            let mut b = a.clone();
                            b[v] -= 1;
                            Some(lookup[&b] as u32)
                        }
                    })
                    .collect()
            })
            .collect();

        MultiIndexTable {
            num_vars,
            order,
            indices,
            lookup,
            products,
            shift_down,
            degree_start,
        }
    }

    /// Shared table for the given shape.
    pub fn get(num_vars: usize, order: usize) -> Arc<MultiIndexTable> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<MultiIndexTable>>>> =
            OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("multi-index cache poisoned");
        guard
            .entry((num_vars, order))
            .or_insert_with(|| Arc::new(MultiIndexTable::build(num_vars, order)))
            .clone()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Vec<u8>] {
        &self.indices
    }

    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    pub fn products(&self) -> &[(u32, u32, u32)] {
        &self.products
    }

    pub(crate) fn shift_down(&self, var: usize) -> &[Option<u32>] {
        &self.shift_down[var]
    }

    /// Range of positions holding multi-indices of total degree `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        self.degree_start[d]..self.degree_start[d + 1]
    }
}

/// Number of multi-indices with `|α| ≤ order` over `num_vars` variables.
pub fn simplex_size(num_vars: usize, order: usize) -> usize {
    // C(num_vars + order, order)
    let mut acc = 1usize;
    for k in 1..=order {
        acc = acc * (num_vars + k) / k;
    }
    acc
}

pub(crate) fn factorial_of(alpha: &[u8]) -> f64 {
    alpha
        .iter()
        .map(|&a| (1..=a as u64).product::<u64>() as f64)
        .product()
}
