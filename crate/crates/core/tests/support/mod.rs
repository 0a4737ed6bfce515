#![allow(dead_code)]

//! Brute-force LP oracle by enumeration of vertices and extreme rays, plus an
//! independent Farkas check. Shares no code with the simplex solver.

use num_traits::{One, Signed, Zero};
use vcsp::exactlp::{LinearProgram, Relation};
use vcsp::model::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Oracle {
    Infeasible,
    Unbounded,
    Optimal(Rational),
}

#[derive(Clone)]
struct Cons {
    a: Vec<Rational>,
    rel: Relation,
    b: Rational,
}

fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

fn satisfied(c: &Cons, x: &[Rational]) -> bool {
    let lhs = dot(&c.a, x);
    match c.rel {
        Relation::Le => lhs <= c.b,
        Relation::Ge => lhs >= c.b,
        Relation::Eq => lhs == c.b,
    }
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..m[i].len() {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

/// Basis of `{d : a·d = 0 for every row a}`.
fn null_space(rows: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let pivots = rref(&mut m, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut d = vec![Rational::zero(); n];
            d[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                d[p] = -m[r][f].clone();
            }
            d
        })
        .collect()
}

/// Unique solution of the square system, if nonsingular.
fn solve_square(rows: &[&Cons], n: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|c| {
            let mut r = c.a.clone();
            r.push(c.b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, n);
    (pivots.len() == n).then(|| (0..n).map(|i| m[i][n].clone()).collect())
}

fn for_each_subset(total: usize, size: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(
        start: usize,
        total: usize,
        size: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for i in start..total {
            if total - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, total, size, cur, f);
            cur.pop();
        }
    }
    rec(0, total, size, &mut Vec::new(), f);
}

pub fn lp_oracle(lp: &LinearProgram) -> Oracle {
    let n = lp.num_vars();
    let c = lp.objective().to_vec();
    let mut cons: Vec<Cons> = lp
        .rows()
        .iter()
        .map(|r| {
            let mut a = vec![Rational::zero(); n];
            for (j, v) in &r.coeffs {
                a[*j] = v.clone();
            }
            Cons {
                a,
                rel: r.relation,
                b: r.rhs.clone(),
            }
        })
        .collect();
    for j in 0..n {
        if lp.nonneg()[j] {
            let mut a = vec![Rational::zero(); n];
            a[j] = Rational::one();
            cons.push(Cons {
                a,
                rel: Relation::Ge,
                b: Rational::zero(),
            });
        }
    }

    // Slice off the lineality space so the polyhedron becomes pointed.
    let normals: Vec<Vec<Rational>> = cons.iter().map(|k| k.a.clone()).collect();
    let lineality = null_space(&normals, n);
    let tilted = lineality.iter().any(|d| !dot(&c, d).is_zero());
    for d in lineality {
        cons.push(Cons {
            a: d,
            rel: Relation::Eq,
            b: Rational::zero(),
        });
    }

    let mut best: Option<Rational> = None;
    for_each_subset(cons.len(), n, &mut |s| {
        let chosen: Vec<&Cons> = s.iter().map(|&i| &cons[i]).collect();
        if let Some(x) = solve_square(&chosen, n) {
            if cons.iter().all(|k| satisfied(k, &x)) {
                let v = dot(&c, &x);
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
    });
    let Some(best) = best else {
        return Oracle::Infeasible;
    };
    if tilted {
        return Oracle::Unbounded;
    }

    let homogeneous: Vec<Cons> = cons
        .iter()
        .map(|k| Cons {
            a: k.a.clone(),
            rel: k.rel,
            b: Rational::zero(),
        })
        .collect();
    let mut unbounded = false;
    for_each_subset(homogeneous.len(), n - 1, &mut |s| {
        if unbounded {
            return;
        }
        let rows: Vec<Vec<Rational>> = s.iter().map(|&i| homogeneous[i].a.clone()).collect();
        let ns = null_space(&rows, n);
        if ns.len() != 1 {
            return;
        }
        let r = &ns[0];
        let neg: Vec<Rational> = r.iter().map(|v| -v.clone()).collect();
        for d in [r, &neg] {
            if homogeneous.iter().all(|k| satisfied(k, d)) && dot(&c, d).is_negative() {
                unbounded = true;
            }
        }
    });
    if unbounded {
        Oracle::Unbounded
    } else {
        Oracle::Optimal(best + lp.constant())
    }
}

/// `y` has the right signs, `A^T y <= 0` on nonnegative columns and `= 0`
/// on free ones, and `b·y > 0`.
pub fn farkas_ok(lp: &LinearProgram, y: &[Rational]) -> bool {
    if y.len() != lp.rows().len() {
        return false;
    }
    let mut aty = vec![Rational::zero(); lp.num_vars()];
    let mut by = Rational::zero();
    for (row, yi) in lp.rows().iter().zip(y) {
        let sign_ok = match row.relation {
            Relation::Le => !yi.is_positive(),
            Relation::Ge => !yi.is_negative(),
            Relation::Eq => true,
        };
        if !sign_ok {
            return false;
        }
        for (j, a) in &row.coeffs {
            aty[*j] += a * yi;
        }
        by += &row.rhs * yi;
    }
    by.is_positive()
        && aty
            .iter()
            .zip(lp.nonneg())
            .all(|(v, &nn)| if nn { !v.is_positive() } else { v.is_zero() })
}
