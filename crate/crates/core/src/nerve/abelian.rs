use serde::Serialize;

use super::complex::Presentation;
use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    /// Free rank of the abelianization.
    pub rank: usize,
    /// Elementary divisors greater than one, in divisibility order.
    pub torsion: Vec<u64>,
}

/// Abelianization from the relator exponent-sum matrix.
pub fn abelianization(p: &Presentation) -> Result<AbelianInvariants> {
    let mut m: Vec<Vec<i128>> = p
        .relators
        .iter()
        .map(|r| {
            let mut row = vec![0i128; p.generators];
            for &l in r {
                row[l.unsigned_abs() as usize - 1] += l.signum() as i128;
            }
            row
        })
        .collect();
    let diag = smith_diagonal(&mut m, p.generators)?;
    let nonzero: Vec<u64> = diag.into_iter().filter(|d| *d != 0).map(|d| d.unsigned_abs() as u64).collect();
    Ok(AbelianInvariants {
        rank: p.generators - nonzero.len(),
        torsion: nonzero.into_iter().filter(|&d| d > 1).collect(),
    })
}

fn overflow() -> LabError {
    LabError::Domain("integer overflow in the normal form".into())
}

/// Diagonal of the Smith normal form of an integer matrix (`cols` columns).
///
/// Pivots are chosen with the smallest absolute value, which keeps entries
/// small on the sparse unit matrices that presentations produce.
pub fn smith_diagonal(m: &mut Vec<Vec<i128>>, cols: usize) -> Result<Vec<i128>> {
    m.retain(|r| r.iter().any(|&x| x != 0));
    let rows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block
        let mut pivot = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && pivot.map_or(true, |(_, _, v): (usize, usize, i128)| x.abs() < v) {
                    pivot = Some((i, j, x.abs()));
                    if x.abs() == 1 {
                        break;
                    }
                }
            }
            if matches!(pivot, Some((_, _, 1))) {
                break;
            }
        }
        let Some((pi, pj, _)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = m[t][t];
            let mut dirty = false;
            // clear column t
            for i in (t + 1)..rows {
                let x = m[i][t];
                if x == 0 {
                    continue;
                }
                let q = x / p;
                for j in t..cols {
                    let v = m[t][j].checked_mul(q).ok_or_else(overflow)?;
                    m[i][j] = m[i][j].checked_sub(v).ok_or_else(overflow)?;
                }
                dirty |= m[i][t] != 0;
            }
            // clear row t
            for j in (t + 1)..cols {
                let x = m[t][j];
                if x == 0 {
                    continue;
                }
                let q = x / p;
                for row in m.iter_mut().skip(t) {
                    let v = row[t].checked_mul(q).ok_or_else(overflow)?;
                    row[j] = row[j].checked_sub(v).ok_or_else(overflow)?;
                }
                dirty |= m[t][j] != 0;
            }
            if dirty {
                // a remainder smaller than the pivot: move it into place
                let (mut bi, mut bj, mut bv) = (t, t, p.abs());
                for i in t..rows {
                    if m[i][t] != 0 && m[i][t].abs() < bv {
                        (bi, bj, bv) = (i, t, m[i][t].abs());
                    }
                }
                for j in t..cols {
                    if m[t][j] != 0 && m[t][j].abs() < bv {
                        (bi, bj, bv) = (t, j, m[t][j].abs());
                    }
                }
                m.swap(t, bi);
                for row in m.iter_mut() {
                    row.swap(t, bj);
                }
                continue;
            }
            // divisibility: every remaining entry must be a multiple of p
            let bad = (t + 1..rows).find(|&i| m[i][t + 1..cols].iter().any(|&x| x % p != 0));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        m[t][j] = m[t][j].checked_add(m[i][j]).ok_or_else(overflow)?;
                    }
                }
                None => break,
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(gens: usize, rels: Vec<Vec<i32>>) -> AbelianInvariants {
        abelianization(&Presentation::new(gens, rels).unwrap()).unwrap()
    }

    #[test]
    fn free_abelian_from_commutator() {
        assert_eq!(ab(2, vec![vec![1, 2, -1, -2]]), AbelianInvariants { rank: 2, torsion: vec![] });
    }

    #[test]
    fn genus_two_surface() {
        let r = vec![1, 2, -1, -2, 3, 4, -3, -4];
        assert_eq!(ab(4, vec![r]).rank, 4);
    }

    #[test]
    fn cyclic_torsion() {
        assert_eq!(ab(1, vec![vec![1, 1, 1]]), AbelianInvariants { rank: 0, torsion: vec![3] });
    }

    #[test]
    fn smith_form_of_nondiagonal_matrix() {
        // Z^2 / <(2, 4), (6, 8)> = Z/2 + Z/4
        let mut m = vec![vec![2i128, 4], vec![6, 8]];
        let d = smith_diagonal(&mut m, 2).unwrap();
        assert_eq!(d, vec![2, 4]);
    }
}
