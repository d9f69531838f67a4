//! Contexts: unordered trios of pairwise compatible Pauli observables whose
//! operator product is plus or minus the identity.
//!
//! This module enumerates every context for a given qubit count, evaluates
//! the closed-form total and negative-context counts, builds the 3x3 KS
//! tables at n=2, and partitions the n=3 contexts into symmetry classes
//! under qubit permutations combined with per-qubit {X,Y,Z} relabelings of
//! equal parity.

use std::collections::{HashMap, HashSet};

use num_integer::binomial;
use serde::{Deserialize, Serialize};

use crate::pauli::{observables, Factor, PauliString};
use crate::Error;

/// Full enumeration is guaranteed feasible up to this qubit count.
pub const MAX_ENUMERATION_QUBITS: usize = 6;

/// A trio of pairwise compatible, distinct, non-identity Pauli strings with
/// product `sign * identity`. Members are kept in canonical
/// (x_mask, z_mask)-lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Context {
    members: [PauliString; 3],
    sign: i8,
}

impl Context {
    pub fn new(a: PauliString, b: PauliString, c: PauliString) -> Result<Self, Error> {
        let mut members = [a, b, c];
        members.sort();
        let [a, b, c] = members;
        if a.is_identity() || b.is_identity() || c.is_identity() {
            return Err(Error::Invariant("context member is the identity".into()));
        }
        if a == b || b == c {
            return Err(Error::Invariant(format!(
                "context members not distinct: {a} {b} {c}"
            )));
        }
        if !(a.commutes(&b)? && a.commutes(&c)? && b.commutes(&c)?) {
            return Err(Error::Invariant(format!(
                "context members not pairwise compatible: {a} {b} {c}"
            )));
        }
        let (phase_ab, ab) = a.multiply(&b)?;
        let (phase_abc, product) = ab.multiply(&c)?;
        if !product.is_identity() {
            return Err(Error::Invariant(format!(
                "product of {a} {b} {c} is not proportional to the identity"
            )));
        }
        let total = phase_ab.compose(phase_abc);
        let sign = total.sign().ok_or_else(|| {
            Error::Invariant(format!("imaginary product phase for {a} {b} {c}"))
        })?;
        Ok(Context { members, sign })
    }

    pub fn from_strs(names: [&str; 3]) -> Result<Self, Error> {
        Context::new(names[0].parse()?, names[1].parse()?, names[2].parse()?)
    }

    pub fn members(&self) -> &[PauliString; 3] {
        &self.members
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_negative(&self) -> bool {
        self.sign < 0
    }

    pub fn n(&self) -> usize {
        self.members[0].n()
    }

    /// Image under a symmetry: permute qubits and relabel each qubit's
    /// {X,Y,Z} by that qubit's permutation (given as the images of X, Y, Z).
    /// When the per-qubit permutations share one parity the image is again a
    /// context with the same sign.
    pub fn relabel(
        &self,
        label_maps: &[[Factor; 3]],
        qubit_map: &[usize],
    ) -> Result<Context, Error> {
        let [a, b, c] = self.members;
        Context::new(
            a.relabel(label_maps, qubit_map),
            b.relabel(label_maps, qubit_map),
            c.relabel(label_maps, qubit_map),
        )
    }

    pub fn column_profile(&self) -> Result<ColumnClassProfile, Error> {
        ColumnClassProfile::of(self)
    }
}

impl<'de> Deserialize<'de> for Context {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            members: [PauliString; 3],
            sign: i8,
        }
        let raw = Raw::deserialize(deserializer)?;
        let ctx = Context::new(raw.members[0], raw.members[1], raw.members[2])
            .map_err(serde::de::Error::custom)?;
        if ctx.sign != raw.sign {
            return Err(serde::de::Error::custom(format!(
                "declared sign {} does not match computed sign {}",
                raw.sign, ctx.sign
            )));
        }
        Ok(ctx)
    }
}

/// Column statistics of the 3-row, n-column table formed by a context's
/// members: `a` clockwise columns (X->Z->Y), `b` counterclockwise columns
/// (X->Y->Z), `c` all-identity columns, `d` one-Pauli-two-I columns, and
/// `rest` columns carrying two identical Paulis and one I.
///
/// For any valid context `d = 0` and `a + b` is even; the context is
/// negative exactly when `floor(a/2) + floor(b/2)` is odd. This gives a sign
/// oracle independent of phase-tracked multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColumnClassProfile {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub rest: usize,
}

impl ColumnClassProfile {
    pub fn of(ctx: &Context) -> Result<Self, Error> {
        let [m1, m2, m3] = ctx.members();
        let mut profile = ColumnClassProfile {
            a: 0,
            b: 0,
            c: 0,
            d: 0,
            rest: 0,
        };
        for q in 1..=ctx.n() {
            let col = [m1.factor(q), m2.factor(q), m3.factor(q)];
            let non_identity = col.iter().filter(|f| **f != Factor::I).count();
            match non_identity {
                0 => profile.c += 1,
                1 => profile.d += 1,
                2 => {
                    let paulis: Vec<_> = col.iter().filter(|f| **f != Factor::I).collect();
                    if paulis[0] != paulis[1] {
                        return Err(Error::Invariant(format!(
                            "column {q} holds two different Paulis and an I"
                        )));
                    }
                    profile.rest += 1;
                }
                _ => {
                    if col[0] == col[1] || col[1] == col[2] || col[0] == col[2] {
                        return Err(Error::Invariant(format!(
                            "column {q} holds a repeated Pauli with no I"
                        )));
                    }
                    if is_cyclic_rotation(col, [Factor::X, Factor::Y, Factor::Z]) {
                        profile.b += 1;
                    } else {
                        profile.a += 1;
                    }
                }
            }
        }
        Ok(profile)
    }

    /// Sign predicted by the column-class parity rule.
    pub fn sign(&self) -> i8 {
        if (self.a / 2 + self.b / 2) % 2 == 1 {
            -1
        } else {
            1
        }
    }
}

fn is_cyclic_rotation(col: [Factor; 3], order: [Factor; 3]) -> bool {
    (0..3).any(|shift| (0..3).all(|i| col[i] == order[(i + shift) % 3]))
}

/// Visit every context on `n` qubits exactly once, in a deterministic order.
///
/// Each unordered trio {A, B, C} is generated from the unique compatible pair
/// (A, B) whose product's Pauli part C is lexicographically greatest, so no
/// dedup set is needed and the scan streams in O(1) memory.
pub fn for_each_context<F: FnMut(Context)>(n: usize, mut visit: F) -> Result<(), Error> {
    if !(2..=MAX_ENUMERATION_QUBITS).contains(&n) {
        return Err(Error::Capability {
            operation: "context enumeration",
            n,
            min: 2,
            max: MAX_ENUMERATION_QUBITS,
        });
    }
    let obs: Vec<PauliString> = observables(n).collect();
    for (i, a) in obs.iter().enumerate() {
        for b in &obs[i + 1..] {
            if !a.commutes(b)? {
                continue;
            }
            let (_, c) = a.multiply(b)?;
            if c > *b {
                visit(Context::new(*a, *b, c)?);
            }
        }
    }
    Ok(())
}

pub fn enumerate_contexts(n: usize) -> Result<Vec<Context>, Error> {
    let mut out = Vec::new();
    for_each_context(n, |ctx| out.push(ctx))?;
    Ok(out)
}

/// (total, negative) context counts by direct enumeration.
pub fn context_counts(n: usize) -> Result<(u128, u128), Error> {
    let mut total = 0u128;
    let mut negative = 0u128;
    for_each_context(n, |ctx| {
        total += 1;
        if ctx.is_negative() {
            negative += 1;
        }
    })?;
    Ok((total, negative))
}

fn check_count_range(operation: &'static str, n: usize) -> Result<(), Error> {
    if !(2..=crate::pauli::MAX_QUBITS).contains(&n) {
        return Err(Error::Capability {
            operation,
            n,
            min: 2,
            max: crate::pauli::MAX_QUBITS,
        });
    }
    Ok(())
}

/// Total context count `N(n) = (4^n - 1)(4^{n-1} - 1) / 3`.
pub fn count_contexts_closed_form(n: usize) -> Result<u128, Error> {
    check_count_range("context counting", n)?;
    let p = 4u128.pow(n as u32) - 1;
    let q = 4u128.pow(n as u32 - 1) - 1;
    Ok(p.checked_mul(q).expect("count overflow") / 3)
}

/// Negative context count: the double sum over column-class multiplicities,
/// divided by 6 for the row orderings of each trio.
pub fn count_negative_closed_form(n: usize) -> Result<u128, Error> {
    check_count_range("negative-context counting", n)?;
    let n_u = n as u128;
    let mut total = 0u128;
    for c in 0..=(n - 2) {
        for a in 0..=(n - c) {
            for b in 0..=(n - c - a) {
                if (a + b) % 2 != 0 || (a / 2 + b / 2) % 2 != 1 {
                    continue;
                }
                let ways = binomial(n_u, c as u128)
                    * binomial(n_u - c as u128, a as u128)
                    * binomial(n_u - c as u128 - a as u128, b as u128);
                let power = 2 * n - a - b - 2 * c;
                total = total
                    .checked_add(ways.checked_mul(3u128.pow(power as u32)).expect("overflow"))
                    .expect("overflow");
            }
        }
    }
    debug_assert_eq!(total % 6, 0);
    Ok(total / 6)
}

/// Satisfiable-context count `S(n) = N(n) - (negative count)`.
pub fn count_positive_closed_form(n: usize) -> Result<u128, Error> {
    Ok(count_contexts_closed_form(n)? - count_negative_closed_form(n)?)
}

/// A 3x3 grid of two-qubit observables whose rows and columns are all
/// contexts, with an odd number of negative lines among the six. No
/// noncontextual assignment can satisfy all six product constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KSTable {
    grid: [[PauliString; 3]; 3],
}

impl KSTable {
    pub fn new(grid: [[PauliString; 3]; 3]) -> Result<Self, Error> {
        let table = KSTable { grid };
        let entries: HashSet<_> = table.grid.iter().flatten().collect();
        if entries.len() != 9 {
            return Err(Error::Invariant("KS table entries not distinct".into()));
        }
        let lines = table.line_contexts()?;
        let negatives = lines.iter().filter(|c| c.is_negative()).count();
        if negatives % 2 == 0 {
            return Err(Error::Invariant(format!(
                "KS table has an even number of negative lines ({negatives}); it admits a model"
            )));
        }
        Ok(table)
    }

    pub fn grid(&self) -> &[[PauliString; 3]; 3] {
        &self.grid
    }

    pub fn row_contexts(&self) -> Result<[Context; 3], Error> {
        let g = &self.grid;
        Ok([
            Context::new(g[0][0], g[0][1], g[0][2])?,
            Context::new(g[1][0], g[1][1], g[1][2])?,
            Context::new(g[2][0], g[2][1], g[2][2])?,
        ])
    }

    pub fn col_contexts(&self) -> Result<[Context; 3], Error> {
        let g = &self.grid;
        Ok([
            Context::new(g[0][0], g[1][0], g[2][0])?,
            Context::new(g[0][1], g[1][1], g[2][1])?,
            Context::new(g[0][2], g[1][2], g[2][2])?,
        ])
    }

    /// The six line contexts, rows first.
    pub fn line_contexts(&self) -> Result<[Context; 6], Error> {
        let r = self.row_contexts()?;
        let c = self.col_contexts()?;
        Ok([r[0], r[1], r[2], c[0], c[1], c[2]])
    }

    /// Canonical row-major form under row permutations, column permutations,
    /// and transposition (72 grid symmetries).
    fn canonical_key(&self) -> [(u16, u16); 9] {
        let mut best: Option<[(u16, u16); 9]> = None;
        for transpose in [false, true] {
            let base = if transpose {
                let g = &self.grid;
                [
                    [g[0][0], g[1][0], g[2][0]],
                    [g[0][1], g[1][1], g[2][1]],
                    [g[0][2], g[1][2], g[2][2]],
                ]
            } else {
                self.grid
            };
            for rp in PERMS3 {
                for cp in PERMS3 {
                    let mut key = [(0u16, 0u16); 9];
                    for (ri, &r) in rp.iter().enumerate() {
                        for (ci, &c) in cp.iter().enumerate() {
                            let p = base[r][c];
                            key[ri * 3 + ci] = (p.x_mask(), p.z_mask());
                        }
                    }
                    if best.is_none() || key < best.unwrap() {
                        best = Some(key);
                    }
                }
            }
        }
        best.unwrap()
    }
}

const PERMS3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn grid_from_strs(names: [[&str; 3]; 3]) -> Result<KSTable, Error> {
    let mut grid = [[PauliString::identity(2)?; 3]; 3];
    for (i, row) in names.iter().enumerate() {
        for (j, name) in row.iter().enumerate() {
            grid[i][j] = name.parse()?;
        }
    }
    KSTable::new(grid)
}

/// The Peres-Mermin square: three positive rows, three negative columns.
pub fn peres_mermin_table() -> KSTable {
    grid_from_strs([["XX", "YZ", "ZY"], ["YY", "ZX", "XZ"], ["ZZ", "XY", "YX"]])
        .expect("canonical table is valid")
}

/// The variant keeping row {YY, ZX, XZ} and column {XX, YY, ZZ} of the
/// Peres-Mermin square and completing with single-qubit observables; only
/// the retained column is negative.
pub fn table2_table() -> KSTable {
    grid_from_strs([["XX", "IX", "XI"], ["YY", "ZX", "XZ"], ["ZZ", "ZI", "IZ"]])
        .expect("canonical table is valid")
}

/// All 3x3 KS tables at n=2, up to row/column/transpose symmetry. There are
/// exactly ten, and each of the 15 contexts appears in four of them.
pub fn enumerate_tables() -> Result<Vec<KSTable>, Error> {
    let contexts = enumerate_contexts(2)?;
    let mut seen: HashSet<[(u16, u16); 9]> = HashSet::new();
    let mut tables = Vec::new();
    for (i, r1) in contexts.iter().enumerate() {
        for (j, r2) in contexts.iter().enumerate().skip(i + 1) {
            if !disjoint(r1, r2) {
                continue;
            }
            for r3 in contexts.iter().skip(j + 1) {
                if !disjoint(r1, r3) || !disjoint(r2, r3) {
                    continue;
                }
                // align rows 2 and 3 against row 1 so columns form contexts
                let m1 = r1.members();
                for p2 in PERMS3 {
                    for p3 in PERMS3 {
                        let grid = [
                            *m1,
                            [r2.members()[p2[0]], r2.members()[p2[1]], r2.members()[p2[2]]],
                            [r3.members()[p3[0]], r3.members()[p3[1]], r3.members()[p3[2]]],
                        ];
                        let cols_ok = (0..3).all(|c| {
                            Context::new(grid[0][c], grid[1][c], grid[2][c]).is_ok()
                        });
                        if !cols_ok {
                            continue;
                        }
                        let table = KSTable::new(grid)?;
                        if seen.insert(table.canonical_key()) {
                            tables.push(table);
                        }
                    }
                }
            }
        }
    }
    Ok(tables)
}

fn disjoint(a: &Context, b: &Context) -> bool {
    a.members().iter().all(|m| !b.members().contains(m))
}

/// An orbit of contexts under qubit permutations combined with per-qubit
/// {X, Y, Z} relabelings of equal parity. All members share one sign.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryClass {
    pub label: &'static str,
    pub orbit_size: usize,
    pub representative: Context,
    pub negative: bool,
}

const CLASS_LABELS: [&str; 7] = ["I", "II", "III", "IV", "V", "VI", "VII"];

/// Partition the 315 n=3 contexts into their seven symmetry classes.
///
/// Classes are labeled I..VII following the published representatives where
/// they are unambiguous; the positive 9-orbit (III) is reported with its
/// lexicographically smallest member since the published list repeats the
/// negative representative for it.
pub fn classify_contexts(n: usize) -> Result<Vec<SymmetryClass>, Error> {
    if n != 3 {
        return Err(Error::Capability {
            operation: "symmetry classification",
            n,
            min: 3,
            max: 3,
        });
    }
    let contexts = enumerate_contexts(3)?;
    let index: HashMap<Context, usize> = contexts
        .iter()
        .enumerate()
        .map(|(i, c)| (*c, i))
        .collect();

    // Label maps are the images of (X, Y, Z); per-qubit maps must share one
    // parity or the context sign is not preserved, so enumerate same-parity
    // triples only.
    let xyz = [Factor::X, Factor::Y, Factor::Z];
    let pauli_perms: Vec<([Factor; 3], bool)> = PERMS3
        .iter()
        .map(|p| {
            let odd = (p[0] > p[1]) as u8 + (p[0] > p[2]) as u8 + (p[1] > p[2]) as u8;
            ([xyz[p[0]], xyz[p[1]], xyz[p[2]]], odd % 2 == 1)
        })
        .collect();
    let mut label_triples: Vec<[[Factor; 3]; 3]> = Vec::new();
    for &(m1, p1) in &pauli_perms {
        for &(m2, p2) in &pauli_perms {
            for &(m3, p3) in &pauli_perms {
                if p1 == p2 && p2 == p3 {
                    label_triples.push([m1, m2, m3]);
                }
            }
        }
    }

    // union-find over context indices
    let mut parent: Vec<usize> = (0..contexts.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, ctx) in contexts.iter().enumerate() {
        for qp in PERMS3 {
            for maps in &label_triples {
                let image = ctx.relabel(maps, &qp)?;
                if image.sign() != ctx.sign() {
                    return Err(Error::Invariant(format!(
                        "symmetry changed a context sign: {ctx:?} -> {image:?}"
                    )));
                }
                let j = index[&image];
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }

    let mut orbits: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..contexts.len() {
        let root = find(&mut parent, i);
        orbits.entry(root).or_default().push(i);
    }

    // anchor orbits on the published representatives
    let anchors: [(usize, [&str; 3]); 6] = [
        (0, ["XII", "IXI", "XXI"]),
        (1, ["XII", "IXX", "XXX"]),
        (3, ["XXI", "XIX", "IXX"]),
        (4, ["XXI", "YZX", "ZYX"]),
        (5, ["XXI", "YYI", "ZZI"]),
        (6, ["XXI", "YYX", "ZZX"]),
    ];
    let mut classes: Vec<Option<SymmetryClass>> = vec![None; 7];
    let mut used_roots = HashSet::new();
    for (slot, names) in anchors {
        let rep = Context::from_strs(names)?;
        let root = find(&mut parent, index[&rep]);
        let orbit = &orbits[&root];
        classes[slot] = Some(SymmetryClass {
            label: CLASS_LABELS[slot],
            orbit_size: orbit.len(),
            representative: rep,
            negative: rep.is_negative(),
        });
        used_roots.insert(root);
    }
    // the remaining orbit is the positive 9-orbit (class III)
    let leftovers: Vec<&Vec<usize>> = orbits
        .iter()
        .filter(|(root, _)| !used_roots.contains(*root))
        .map(|(_, members)| members)
        .collect();
    if leftovers.len() != 1 {
        return Err(Error::Invariant(format!(
            "expected exactly one unanchored orbit, found {}",
            leftovers.len()
        )));
    }
    let orbit = leftovers[0];
    let rep = *orbit.iter().map(|&i| &contexts[i]).min().unwrap();
    classes[2] = Some(SymmetryClass {
        label: CLASS_LABELS[2],
        orbit_size: orbit.len(),
        representative: rep,
        negative: rep.is_negative(),
    });

    Ok(classes.into_iter().map(|c| c.unwrap()).collect())
}
