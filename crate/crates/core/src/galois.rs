//! Finite Galois quotients, equivariant lattices and finitely generated
//! modules over them, with exact fixed points (H0) and first cohomology (H1).
//!
//! The absolute Galois group acts on every finitely generated module
//! through a finite quotient, so the group here is always finite and given
//! by its multiplication table. H1 is computed by a generators-and-relations
//! method (unknowns only at group generators, one linear condition per
//! non-tree edge of the Cayley graph); a full-table method over all group
//! elements is kept as an independent oracle.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    cokernel, inverse_unimodular, preimage_basis, quotient_group, snf, FinAbGroup, IntMatrix,
    LatticeSolver,
};

/// A finite group given by its multiplication table.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>, // row-major order x order table of element indices
    identity: usize,
    inverses: Vec<usize>,
    generators: Vec<usize>,
    element_names: Option<Vec<String>>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.mul == other.mul
            && self.identity == other.identity
            && self.generators == other.generators
    }
}

impl Eq for FiniteGroup {}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup(order={})", self.order)
    }
}

impl FiniteGroup {
    /// Build from a full multiplication table; every group axiom and the
    /// generation property are checked.
    pub fn from_table(
        table: &[Vec<usize>],
        generators: Vec<usize>,
        element_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::Validation("group of order zero".into()));
        }
        let mut mul = Vec::with_capacity(order * order);
        for row in table {
            if row.len() != order {
                return Err(Error::Validation(format!(
                    "multiplication table row of length {} in a group of order {order}",
                    row.len()
                )));
            }
            for &e in row {
                if e >= order {
                    return Err(Error::Validation(format!(
                        "element index {e} out of range in multiplication table"
                    )));
                }
                mul.push(e);
            }
        }
        if let Some(names) = &element_names {
            if names.len() != order {
                return Err(Error::Validation(format!(
                    "{} element names for a group of order {order}",
                    names.len()
                )));
            }
        }
        for &g in &generators {
            if g >= order {
                return Err(Error::Validation(format!(
                    "generator index {g} out of range"
                )));
            }
        }

        let at = |a: usize, b: usize| mul[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::Validation("multiplication table has no identity".into()))?;
        let mut inverses = vec![usize::MAX; order];
        for g in 0..order {
            let inv = (0..order)
                .find(|&h| at(g, h) == identity && at(h, g) == identity)
                .ok_or_else(|| {
                    Error::Validation(format!("element {g} has no two-sided inverse"))
                })?;
            inverses[g] = inv;
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(Error::Validation(format!(
                            "multiplication table is not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }

        let group = Self {
            order,
            mul,
            identity,
            inverses,
            generators,
            element_names,
        };
        let reached = group.closure_from_identity();
        if reached.iter().filter(|&&r| r).count() != order {
            return Err(Error::Validation(
                "generators do not generate the whole group".into(),
            ));
        }
        Ok(group)
    }

    /// Build from permutation generators; the element set is the closure of
    /// the generators under composition and the table is derived from it.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Result<Self> {
        let degree = perms.first().map_or(0, |p| p.len());
        if degree == 0 {
            return Err(Error::Validation(
                "permutation generators need positive degree".into(),
            ));
        }
        for p in perms {
            if p.len() != degree || !is_permutation(p) {
                return Err(Error::Validation(format!(
                    "generator {p:?} is not a permutation of 0..{degree}"
                )));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elements: Vec<Vec<usize>> = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(id, 0);
        let mut cursor = 0;
        while cursor < elements.len() {
            let current = elements[cursor].clone();
            for p in perms {
                let product = compose(&current, p);
                if !index.contains_key(&product) {
                    index.insert(product.clone(), elements.len());
                    elements.push(product);
                }
            }
            cursor += 1;
        }
        let order = elements.len();
        let mut table = vec![vec![0usize; order]; order];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                let product = compose(a, b);
                table[i][j] = *index
                    .get(&product)
                    .expect("closure is closed under composition");
            }
        }
        let generators = perms.iter().map(|p| index[p]).collect();
        Self::from_table(&table, generators, None)
    }

    pub fn trivial() -> Self {
        Self::from_table(&[vec![0]], vec![], None).expect("trivial group is valid")
    }

    fn closure_from_identity(&self) -> Vec<bool> {
        let mut reached = vec![false; self.order];
        reached[self.identity] = true;
        let mut queue = vec![self.identity];
        while let Some(g) = queue.pop() {
            for &s in &self.generators {
                let h = self.mul(g, s);
                if !reached[h] {
                    reached[h] = true;
                    queue.push(h);
                }
            }
        }
        reached
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn element_name(&self, i: usize) -> String {
        match &self.element_names {
            Some(names) => names[i].clone(),
            None => format!("g{i}"),
        }
    }

    pub fn element_names(&self) -> Option<&[String]> {
        self.element_names.as_deref()
    }

    pub fn multiplication_table(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.mul(i, j)).collect())
            .collect()
    }

    pub fn is_subgroup(&self, elems: &[usize]) -> bool {
        if elems.is_empty() || elems.iter().any(|&e| e >= self.order) {
            return false;
        }
        let set: std::collections::BTreeSet<usize> = elems.iter().copied().collect();
        set.contains(&self.identity)
            && set
                .iter()
                .all(|&a| set.iter().all(|&b| set.contains(&self.mul(a, b))))
            && set.iter().all(|&a| set.contains(&self.inv(a)))
    }

    /// All subgroups, as sorted element lists in a deterministic order.
    /// Brute force; intended for the small built-in groups only.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        assert!(self.order <= 12, "subgroup enumeration is for small groups");
        let mut out = Vec::new();
        for mask in 0u32..(1 << self.order) {
            let elems: Vec<usize> = (0..self.order).filter(|&i| mask & (1 << i) != 0).collect();
            if !elems.is_empty() && self.is_subgroup(&elems) {
                out.push(elems);
            }
        }
        out.sort_by_key(|s| (s.len(), s.clone()));
        out
    }

    /// BFS order and per-element generator words from the identity.
    /// Deterministic: queue order, generators in declared order.
    fn bfs_edges(&self) -> Vec<BfsEdge> {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut queue = std::collections::VecDeque::from([self.identity]);
        let mut edges = Vec::new();
        while let Some(g) = queue.pop_front() {
            for (gi, &s) in self.generators.iter().enumerate() {
                let h = self.mul(g, s);
                let tree = !seen[h];
                if tree {
                    seen[h] = true;
                    queue.push_back(h);
                }
                edges.push(BfsEdge { from: g, generator: gi, to: h, tree });
            }
        }
        edges
    }
}

struct BfsEdge {
    from: usize,
    generator: usize,
    to: usize,
    tree: bool,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// (a o b)(x) = a[b[x]]
fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

/// A free finitely generated abelian group with an action of a finite group
/// by automorphisms; one integer matrix per group element, acting on column
/// vectors from the left.
#[derive(Clone, PartialEq, Eq)]
pub struct GammaLattice {
    group: Arc<FiniteGroup>,
    rank: usize,
    action: Vec<IntMatrix>,
}

impl std::fmt::Debug for GammaLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "GammaLattice(rank={}, |group|={})",
            self.rank,
            self.group.order()
        )
    }
}

impl GammaLattice {
    pub fn new(group: Arc<FiniteGroup>, action: Vec<IntMatrix>) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::Validation(format!(
                "{} action matrices for a group of order {}",
                action.len(),
                group.order()
            )));
        }
        let rank = action.first().map_or(0, |m| m.rows());
        for (g, m) in action.iter().enumerate() {
            if m.rows() != rank || m.cols() != rank {
                return Err(Error::Validation(format!(
                    "action of {} is {}x{}, expected {rank}x{rank}",
                    group.element_name(g),
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.determinant().abs().is_one() {
                return Err(Error::Validation(format!(
                    "action of {} is not invertible over the integers",
                    group.element_name(g)
                )));
            }
        }
        if action[group.identity()] != IntMatrix::identity(rank) {
            return Err(Error::Validation(
                "identity element does not act as the identity matrix".into(),
            ));
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                let gh = group.mul(g, h);
                if action[g].mul(&action[h]) != action[gh] {
                    return Err(Error::Validation(format!(
                        "action is not a homomorphism at the pair ({}, {})",
                        group.element_name(g),
                        group.element_name(h)
                    )));
                }
            }
        }
        Ok(Self { group, rank, action })
    }

    /// Extend matrices given per group generator to the whole group along a
    /// breadth-first traversal, then validate the full action.
    pub fn from_generator_actions(
        group: Arc<FiniteGroup>,
        generator_actions: &[IntMatrix],
    ) -> Result<Self> {
        if generator_actions.len() != group.generators().len() {
            return Err(Error::Validation(format!(
                "{} generator actions for {} generators",
                generator_actions.len(),
                group.generators().len()
            )));
        }
        let rank = generator_actions.first().map_or(0, |m| m.rows());
        let mut action: Vec<Option<IntMatrix>> = vec![None; group.order()];
        action[group.identity()] = Some(IntMatrix::identity(rank));
        for edge in group.bfs_edges() {
            if edge.tree {
                let base = action[edge.from].clone().expect("BFS visits parents first");
                action[edge.to] = Some(base.mul(&generator_actions[edge.generator]));
            }
        }
        let action: Vec<IntMatrix> = action
            .into_iter()
            .map(|m| m.expect("generators reach every element"))
            .collect();
        Self::new(group, action)
    }

    pub fn trivial(group: Arc<FiniteGroup>, rank: usize) -> Self {
        let action = vec![IntMatrix::identity(rank); group.order()];
        Self { group, rank, action }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn act(&self, g: usize) -> &IntMatrix {
        &self.action[g]
    }

    /// Whether every action matrix is a permutation matrix.
    pub fn is_permutation(&self) -> bool {
        self.action.iter().all(|m| {
            let mut row_sum = vec![0usize; m.rows()];
            let mut col_sum = vec![0usize; m.cols()];
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let e = m.get(i, j);
                    if e.is_one() {
                        row_sum[i] += 1;
                        col_sum[j] += 1;
                    } else if !e.is_zero() {
                        return false;
                    }
                }
            }
            row_sum.iter().all(|&s| s == 1) && col_sum.iter().all(|&s| s == 1)
        })
    }
}

/// A finitely generated module over the group: a lattice presentation
/// `ambient / image(relations)` whose relation lattice is carried into
/// itself by the action.
#[derive(Clone, PartialEq, Eq)]
pub struct GammaModule {
    ambient: GammaLattice,
    relations: IntMatrix,
    underlying: FinAbGroup,
}

impl std::fmt::Debug for GammaModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "GammaModule(rank={}, relations={}, underlying={})",
            self.ambient.rank(),
            self.relations.cols(),
            self.underlying
        )
    }
}

impl GammaModule {
    pub fn new(ambient: GammaLattice, relations: IntMatrix) -> Result<Self> {
        if relations.rows() != ambient.rank() {
            return Err(Error::Validation(format!(
                "relation matrix has {} rows for a rank-{} lattice",
                relations.rows(),
                ambient.rank()
            )));
        }
        let solver = LatticeSolver::new(&relations);
        let group = ambient.group().clone();
        for g in 0..group.order() {
            let moved = ambient.act(g).mul(&relations);
            for j in 0..moved.cols() {
                if !solver.contains(&moved.column(j)) {
                    return Err(Error::Validation(format!(
                        "relation lattice is not stable under {}",
                        group.element_name(g)
                    )));
                }
            }
        }
        let underlying = cokernel(&relations);
        Ok(Self { ambient, relations, underlying })
    }

    pub fn from_lattice(ambient: GammaLattice) -> Self {
        let relations = IntMatrix::zeros(ambient.rank(), 0);
        let underlying = FinAbGroup::free(ambient.rank());
        Self { ambient, relations, underlying }
    }

    pub fn ambient(&self) -> &GammaLattice {
        &self.ambient
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn underlying(&self) -> &FinAbGroup {
        &self.underlying
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.ambient.group()
    }

    pub fn rank(&self) -> usize {
        self.ambient.rank()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.underlying.is_torsion_free()
    }
}

/// An equivariant map of modules, given on ambient lattices.
///
/// Equivariance is required modulo the target relation lattice (which is the
/// well-definedness condition on the quotients); when the target is a
/// lattice this is exact matrix equality. The matrix must also carry source
/// relations into target relations.
#[derive(Clone)]
pub struct GammaMap {
    source: GammaModule,
    target: GammaModule,
    matrix: IntMatrix,
}

impl std::fmt::Debug for GammaMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "GammaMap({:?} -> {:?})",
            self.source, self.target
        )
    }
}

impl GammaMap {
    pub fn new(source: GammaModule, target: GammaModule, matrix: IntMatrix) -> Result<Self> {
        if source.group() != target.group() {
            return Err(Error::CompositionMismatch(
                "source and target live over different groups".into(),
            ));
        }
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::Validation(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        let tgt_solver = LatticeSolver::new(target.relations());
        let group = source.group().clone();
        for g in 0..group.order() {
            let lhs = matrix.mul(source.ambient().act(g));
            let rhs = target.ambient().act(g).mul(&matrix);
            let diff = lhs.sub(&rhs);
            for j in 0..diff.cols() {
                if !tgt_solver.contains(&diff.column(j)) {
                    return Err(Error::Validation(format!(
                        "map is not equivariant at {}",
                        group.element_name(g)
                    )));
                }
            }
        }
        let moved = matrix.mul(source.relations());
        for j in 0..moved.cols() {
            if !tgt_solver.contains(&moved.column(j)) {
                return Err(Error::Validation(
                    "map does not carry source relations into target relations".into(),
                ));
            }
        }
        Ok(Self { source, target, matrix })
    }

    pub fn source(&self) -> &GammaModule {
        &self.source
    }

    pub fn target(&self) -> &GammaModule {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `self` after `inner`; endpoints must match structurally.
    pub fn compose(&self, inner: &GammaMap) -> Result<GammaMap> {
        if inner.target != self.source {
            return Err(Error::CompositionMismatch(
                "inner target does not match outer source".into(),
            ));
        }
        GammaMap::new(
            inner.source.clone(),
            self.target.clone(),
            self.matrix.mul(&inner.matrix),
        )
    }
}

/// Permutation module: the group acts on a finite set, given as one point
/// permutation per group generator; basis vectors are the points.
pub fn permutation_lattice(
    group: &Arc<FiniteGroup>,
    generator_perms: &[Vec<usize>],
) -> Result<GammaLattice> {
    if generator_perms.len() != group.generators().len() {
        return Err(Error::RelationViolation(format!(
            "{} point permutations for {} group generators",
            generator_perms.len(),
            group.generators().len()
        )));
    }
    let degree = generator_perms.first().map_or(0, |p| p.len());
    if group.generators().is_empty() {
        // trivial group: any set size works, but there is nothing to read a
        // degree from; callers use `GammaLattice::trivial` instead
        return Ok(GammaLattice::trivial(group.clone(), degree));
    }
    for p in generator_perms {
        if p.len() != degree || !is_permutation(p) {
            return Err(Error::RelationViolation(format!(
                "{p:?} is not a permutation of 0..{degree}"
            )));
        }
    }
    let mut perms: Vec<Option<Vec<usize>>> = vec![None; group.order()];
    perms[group.identity()] = Some((0..degree).collect());
    for edge in group.bfs_edges() {
        let base = perms[edge.from].clone().expect("BFS visits parents first");
        let candidate = compose(&base, &generator_perms[edge.generator]);
        match &perms[edge.to] {
            None => perms[edge.to] = Some(candidate),
            Some(existing) => {
                if *existing != candidate {
                    return Err(Error::RelationViolation(format!(
                        "point permutations are inconsistent along the pair ({}, {})",
                        group.element_name(edge.from),
                        group.element_name(group.generators()[edge.generator])
                    )));
                }
            }
        }
    }
    let perms: Vec<Vec<usize>> = perms
        .into_iter()
        .map(|p| p.expect("generators reach every element"))
        .collect();
    for g in 0..group.order() {
        for h in 0..group.order() {
            let gh = group.mul(g, h);
            if compose(&perms[g], &perms[h]) != perms[gh] {
                return Err(Error::RelationViolation(format!(
                    "point permutations do not extend to an action at the pair ({}, {})",
                    group.element_name(g),
                    group.element_name(h)
                )));
            }
        }
    }
    let action = perms
        .iter()
        .map(|p| {
            let mut m = IntMatrix::zeros(degree, degree);
            for (j, &img) in p.iter().enumerate() {
                m.set(img, j, BigInt::one());
            }
            m
        })
        .collect();
    GammaLattice::new(group.clone(), action)
}

/// Per-generator permutations of the left cosets of a subgroup, the
/// transitive building block for permutation modules.
pub fn coset_permutations(
    group: &Arc<FiniteGroup>,
    subgroup: &[usize],
) -> Result<Vec<Vec<usize>>> {
    if !group.is_subgroup(subgroup) {
        return Err(Error::InvalidSubgroup(format!(
            "{subgroup:?} is not a subgroup"
        )));
    }
    let mut coset_of = vec![usize::MAX; group.order()];
    let mut reps = Vec::new();
    for x in 0..group.order() {
        if coset_of[x] == usize::MAX {
            let c = reps.len();
            reps.push(x);
            for &h in subgroup {
                coset_of[group.mul(x, h)] = c;
            }
        }
    }
    Ok(group
        .generators()
        .iter()
        .map(|&g| reps.iter().map(|&x| coset_of[group.mul(g, x)]).collect())
        .collect())
}

/// Presentation of the fixed-point subgroup: `basis` spans the sublattice of
/// ambient vectors fixed modulo relations, `relations` re-expresses the
/// module relations in that basis. The fixed group is the cokernel of
/// `relations`.
#[derive(Clone, Debug)]
pub struct FixedPoints {
    pub basis: IntMatrix,
    pub relations: IntMatrix,
}

pub fn h0_presentation(m: &GammaModule) -> FixedPoints {
    let rank = m.rank();
    let gens = m.group().generators();
    let mut stacked = IntMatrix::zeros(0, rank);
    for &g in gens {
        let block = m.ambient().act(g).sub(&IntMatrix::identity(rank));
        stacked = stacked.vconcat(&block);
    }
    let sub = block_diagonal(m.relations(), gens.len());
    let basis = preimage_basis(&stacked, &sub);
    let relations = LatticeSolver::new(&basis)
        .solve_all(m.relations())
        .expect("relation lattice lies inside the fixed-point lattice");
    FixedPoints { basis, relations }
}

/// Fixed points of the underlying group, in canonical form.
pub fn h0(m: &GammaModule) -> FinAbGroup {
    cokernel(&h0_presentation(m).relations)
}

/// The inclusion of the fixed-point module (with trivial action) into `m`.
pub fn h0_sub(m: &GammaModule) -> GammaMap {
    let fixed = h0_presentation(m);
    let ambient = GammaLattice::trivial(m.group().clone(), fixed.basis.cols());
    let module = GammaModule::new(ambient, fixed.relations.clone())
        .expect("fixed-point presentation is a valid module");
    GammaMap::new(module, m.clone(), fixed.basis)
        .expect("fixed-point inclusion is equivariant by construction")
}

/// Matrix of the map induced on fixed-point presentations by `f`.
pub fn h0_induced(f: &GammaMap, source: &FixedPoints, target: &FixedPoints) -> IntMatrix {
    let moved = f.matrix().mul(&source.basis);
    LatticeSolver::new(&target.basis)
        .solve_all(&moved)
        .expect("equivariant maps carry fixed points to fixed points")
}

/// Kernel of the homomorphism of presented abelian groups
/// `Z^a / src_rel -> Z^b / tgt_rel` given by `map`; returns the kernel in
/// canonical form together with a basis of its preimage lattice in Z^a.
pub fn presented_kernel(
    map: &IntMatrix,
    src_rel: &IntMatrix,
    tgt_rel: &IntMatrix,
) -> (FinAbGroup, IntMatrix) {
    let pre = preimage_basis(map, tgt_rel);
    let group = quotient_group(&pre, src_rel);
    (group, pre)
}

fn block_diagonal(block: &IntMatrix, copies: usize) -> IntMatrix {
    let mut out = IntMatrix::zeros(block.rows() * copies, block.cols() * copies);
    for c in 0..copies {
        for i in 0..block.rows() {
            for j in 0..block.cols() {
                out.set(c * block.rows() + i, c * block.cols() + j, block.get(i, j).clone());
            }
        }
    }
    out
}

/// First cohomology by generators and relations: one block of unknowns per
/// group generator, one linear condition per non-tree edge of the Cayley
/// graph, all imposed modulo the module relations.
pub fn h1(m: &GammaModule) -> FinAbGroup {
    let rank = m.rank();
    let group = m.group().clone();
    let gens = group.generators();
    let k = gens.len();
    if k == 0 {
        return FinAbGroup::trivial();
    }
    let unknowns = rank * k;

    // coefficient matrix of the cocycle value at each element, in terms of
    // the generator values
    let mut coef: Vec<Option<IntMatrix>> = vec![None; group.order()];
    coef[group.identity()] = Some(IntMatrix::zeros(rank, unknowns));
    let mut conditions: Vec<IntMatrix> = Vec::new();
    for edge in group.bfs_edges() {
        let mut candidate = coef[edge.from]
            .clone()
            .expect("BFS visits parents first");
        let acting = m.ambient().act(edge.from);
        for i in 0..rank {
            for j in 0..rank {
                let v = candidate.get(i, edge.generator * rank + j) + acting.get(i, j);
                candidate.set(i, edge.generator * rank + j, v);
            }
        }
        match &coef[edge.to] {
            None => coef[edge.to] = Some(candidate),
            Some(existing) => {
                let condition = candidate.sub(existing);
                if !condition.is_zero() {
                    conditions.push(condition);
                }
            }
        }
    }

    let mut stacked = IntMatrix::zeros(0, unknowns);
    for c in &conditions {
        stacked = stacked.vconcat(c);
    }
    let sub = block_diagonal(m.relations(), conditions.len());
    let cocycles = preimage_basis(&stacked, &sub);

    // coboundaries x -> (g_i x - x), plus the relation lattice in every block
    let mut boundary = IntMatrix::zeros(0, rank);
    for &g in gens {
        boundary = boundary.vconcat(&m.ambient().act(g).sub(&IntMatrix::identity(rank)));
    }
    let denominators = boundary.hconcat(&block_diagonal(m.relations(), k));
    quotient_group(&cocycles, &denominators)
}

/// Size bound for the full-table cohomology oracle.
pub const H1_ORACLE_BOUND: usize = 64;

/// First cohomology by the full-table method: one block of unknowns per
/// group element and all |G|^2 cocycle conditions. Independent verification
/// path for `h1`; guarded because it scales badly.
pub fn h1_oracle(m: &GammaModule) -> Result<FinAbGroup> {
    let rank = m.rank();
    let group = m.group().clone();
    let n = group.order();
    let size = n * rank;
    if size > H1_ORACLE_BOUND {
        return Err(Error::SizeGuard { size, bound: H1_ORACLE_BOUND });
    }
    if rank == 0 {
        return Ok(FinAbGroup::trivial());
    }
    let unknowns = rank * n;
    let mut conditions: Vec<IntMatrix> = Vec::new();
    for g in 0..n {
        for h in 0..n {
            let gh = group.mul(g, h);
            // c(gh) - c(g) - g.c(h) in relations
            let mut block = IntMatrix::zeros(rank, unknowns);
            for i in 0..rank {
                let v = block.get(i, gh * rank + i) + BigInt::one();
                block.set(i, gh * rank + i, v);
                let w = block.get(i, g * rank + i) - BigInt::one();
                block.set(i, g * rank + i, w);
            }
            let acting = m.ambient().act(g);
            for i in 0..rank {
                for j in 0..rank {
                    let v = block.get(i, h * rank + j) - acting.get(i, j);
                    block.set(i, h * rank + j, v);
                }
            }
            if !block.is_zero() {
                conditions.push(block);
            }
        }
    }
    let mut stacked = IntMatrix::zeros(0, unknowns);
    for c in &conditions {
        stacked = stacked.vconcat(c);
    }
    let sub = block_diagonal(m.relations(), conditions.len());
    let cocycles = preimage_basis(&stacked, &sub);

    let mut boundary = IntMatrix::zeros(0, rank);
    for g in 0..n {
        boundary = boundary.vconcat(&m.ambient().act(g).sub(&IntMatrix::identity(rank)));
    }
    let denominators = boundary.hconcat(&block_diagonal(m.relations(), n));
    Ok(quotient_group(&cocycles, &denominators))
}

/// The quotient module m / n*m, with the inherited action.
pub fn mod_n(m: &GammaModule, n: &BigInt) -> GammaModule {
    assert!(n >= &BigInt::one(), "modulus must be positive");
    let scaled = IntMatrix::identity(m.rank()).scale(n);
    let relations = m.relations().hconcat(&scaled);
    GammaModule::new(m.ambient().clone(), relations)
        .expect("scaling relations preserves stability")
}

/// Kernel of a map of modules, as a module with the induced action, plus its
/// inclusion into the source.
pub fn kernel_map(f: &GammaMap) -> (GammaModule, GammaMap) {
    let basis = preimage_basis(f.matrix(), f.target().relations());
    let solver = LatticeSolver::new(&basis);
    let group = f.source().group().clone();
    let action = (0..group.order())
        .map(|g| {
            let moved = f.source().ambient().act(g).mul(&basis);
            solver
                .solve_all(&moved)
                .expect("kernel lattice is stable under the action")
        })
        .collect();
    let lattice = GammaLattice::new(group, action)
        .expect("induced kernel action is a valid lattice action");
    let relations = solver
        .solve_all(f.source().relations())
        .expect("source relations lie inside the kernel lattice");
    let module = GammaModule::new(lattice, relations)
        .expect("kernel presentation is a valid module");
    let inclusion = GammaMap::new(module.clone(), f.source().clone(), basis)
        .expect("kernel inclusion is equivariant by construction");
    (module, inclusion)
}

/// Cokernel of a map of modules: the target with the image adjoined to its
/// relations.
pub fn cokernel_map(f: &GammaMap) -> GammaModule {
    let relations = f.matrix().hconcat(f.target().relations());
    GammaModule::new(f.target().ambient().clone(), relations)
        .expect("image of an equivariant map is action-stable")
}

/// Compare a claimed fixed-point group against brute-force enumeration of
/// the underlying group. `None` when the module is infinite or larger than
/// `cap`; otherwise whether the isomorphism types agree.
pub fn h0_matches_enumeration(
    m: &GammaModule,
    claimed: &FinAbGroup,
    cap: u64,
) -> Option<bool> {
    let order = m.underlying().order()?;
    let order_u64 = u64::try_from(order).ok()?;
    if order_u64 > cap {
        return None;
    }
    let dec = snf(m.relations());
    let rank = m.rank();
    // all rows must carry a nonzero invariant factor for finiteness
    let diag = dec.diag();
    if diag.len() < rank || diag.iter().any(|d| d.is_zero()) {
        return None;
    }
    let factors: Vec<u64> = diag.iter().map(|d| u64::try_from(d.clone()).ok()).collect::<Option<_>>()?;
    let uinv = inverse_unimodular(&dec.u);
    // action in the diagonal coordinates
    let gens = m.group().generators();
    let transformed: Vec<IntMatrix> = gens
        .iter()
        .map(|&g| dec.u.mul(m.ambient().act(g)).mul(&uinv))
        .collect();

    let reduce = |v: &[BigInt]| -> Vec<u64> {
        v.iter()
            .zip(&factors)
            .map(|(x, d)| {
                let m = x.mod_floor(&BigInt::from(*d));
                u64::try_from(m).expect("reduced coordinate fits")
            })
            .collect()
    };

    let mut histogram: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
    let mut idx = vec![0u64; rank];
    let total: u64 = factors.iter().product();
    for _ in 0..total {
        let vec: Vec<BigInt> = idx.iter().map(|&x| BigInt::from(x)).collect();
        let fixed = transformed.iter().all(|t| reduce(&t.mul_vec(&vec)) == idx);
        if fixed {
            let mut ord = 1u64;
            for (x, d) in idx.iter().zip(&factors) {
                ord = ord.lcm(&(d / x.gcd(d)));
            }
            *histogram.entry(ord).or_insert(0) += 1;
        }
        for pos in 0..rank {
            idx[pos] += 1;
            if idx[pos] < factors[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }

    // compare the profile m -> #{x fixed : m x = 0} with the closed form of
    // the claimed group
    if !claimed.is_finite() {
        return Some(false);
    }
    let observed_total: u64 = histogram.values().sum();
    if BigInt::from(observed_total) != claimed.order().expect("finite") {
        return Some(false);
    }
    let mut moduli: std::collections::BTreeSet<u64> = histogram.keys().copied().collect();
    let exponent = u64::try_from(claimed.exponent()).ok()?;
    moduli.extend(divisors(exponent));
    for q in moduli {
        let observed: u64 = histogram
            .iter()
            .filter(|(o, _)| q % *o == 0)
            .map(|(_, c)| c)
            .sum();
        if BigInt::from(observed) != claimed.count_killed_by(&BigInt::from(q)) {
            return Some(false);
        }
    }
    Some(true)
}

pub(crate) fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> Arc<FiniteGroup> {
        let perm: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Arc::new(FiniteGroup::from_permutations(&[perm]).unwrap())
    }

    fn sign_module(group: &Arc<FiniteGroup>) -> GammaModule {
        // order-2 group acting on Z by -1
        let minus = IntMatrix::from_i64(&[&[-1]]);
        let lat = GammaLattice::from_generator_actions(group.clone(), &[minus]).unwrap();
        GammaModule::from_lattice(lat)
    }

    fn swap_module(group: &Arc<FiniteGroup>) -> GammaModule {
        let swap = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let lat = GammaLattice::from_generator_actions(group.clone(), &[swap]).unwrap();
        GammaModule::from_lattice(lat)
    }

    #[test]
    fn group_from_table_rejects_non_group() {
        // constant table: no identity
        let table = vec![vec![0, 0], vec![0, 0]];
        assert!(FiniteGroup::from_table(&table, vec![1], None).is_err());
    }

    #[test]
    fn group_closure_and_inverses() {
        let c4 = cyclic(4);
        assert_eq!(c4.order(), 4);
        let g = c4.generators()[0];
        assert_eq!(c4.mul(g, c4.inv(g)), c4.identity());
        // generators must generate
        let table = c4.multiplication_table();
        assert!(FiniteGroup::from_table(&table, vec![c4.identity()], None).is_err());
    }

    #[test]
    fn symmetric_group_from_permutations() {
        let s3 = FiniteGroup::from_permutations(&[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.subgroups().len(), 6); // 1, three C2, A3, S3
    }

    #[test]
    fn permutation_lattice_examples() {
        let c2 = cyclic(2);
        // regular action
        let lat = permutation_lattice(&c2, &[vec![1, 0]]).unwrap();
        assert!(lat.is_permutation());
        let g = c2.generators()[0];
        assert_eq!(lat.act(g), &IntMatrix::from_i64(&[&[0, 1], &[1, 0]]));

        // one-point set
        let lat = permutation_lattice(&c2, &[vec![0]]).unwrap();
        assert_eq!(lat.rank(), 1);
        assert_eq!(lat.act(g), &IntMatrix::identity(1));

        // order-4 group acting through its order-2 quotient
        let c4 = cyclic(4);
        let lat = permutation_lattice(&c4, &[vec![1, 0]]).unwrap();
        assert_eq!(lat.rank(), 2);
        assert_eq!(
            lat.act(c4.generators()[0]),
            &IntMatrix::from_i64(&[&[0, 1], &[1, 0]])
        );
    }

    #[test]
    fn permutation_lattice_relation_violation() {
        // a 3-cycle does not satisfy g^4 = e faithfully enough: g^4 acts as
        // the 3-cycle again, not the identity
        let c4 = cyclic(4);
        let err = permutation_lattice(&c4, &[vec![1, 2, 0]]).unwrap_err();
        assert!(matches!(err, Error::RelationViolation(_)));
    }

    #[test]
    fn coset_permutations_give_regular_action() {
        let c2 = cyclic(2);
        let perms = coset_permutations(&c2, &[c2.identity()]).unwrap();
        assert_eq!(perms, vec![vec![1, 0]]);
        let bad = coset_permutations(&c2, &[1]);
        assert!(matches!(bad, Err(Error::InvalidSubgroup(_))));
    }

    #[test]
    fn h0_examples() {
        let c2 = cyclic(2);
        // swap on Z^2: fixed points are the diagonal
        assert_eq!(h0(&swap_module(&c2)), FinAbGroup::free(1));
        // sign on Z: only 0 is fixed
        assert_eq!(h0(&sign_module(&c2)), FinAbGroup::trivial());
        // sign on Z/3: x = -x forces 3x = 0 and 2x = 0, so x = 0
        let m = GammaModule::new(
            sign_module(&c2).ambient().clone(),
            IntMatrix::from_i64(&[&[3]]),
        )
        .unwrap();
        assert_eq!(h0(&m), FinAbGroup::trivial());
        // sign on Z/2 is the trivial action
        let m = GammaModule::new(
            sign_module(&c2).ambient().clone(),
            IntMatrix::from_i64(&[&[2]]),
        )
        .unwrap();
        assert_eq!(h0(&m), FinAbGroup::cyclic(2));
    }

    #[test]
    fn h0_matches_brute_force() {
        let c2 = cyclic(2);
        for relations in [3i64, 2, 12] {
            let m = GammaModule::new(
                sign_module(&c2).ambient().clone(),
                IntMatrix::from_i64(&[&[relations]]),
            )
            .unwrap();
            let claimed = h0(&m);
            assert_eq!(h0_matches_enumeration(&m, &claimed, 10_000), Some(true));
        }
    }

    #[test]
    fn h0_sub_examples() {
        let c2 = cyclic(2);
        let incl = h0_sub(&swap_module(&c2));
        assert!(crate::lattice::lattices_equal(
            incl.matrix(),
            &IntMatrix::from_i64(&[&[1], &[1]])
        ));

        let trivial = GammaModule::from_lattice(GammaLattice::trivial(c2.clone(), 3));
        let incl = h0_sub(&trivial);
        assert!(crate::lattice::lattices_equal(
            incl.matrix(),
            &IntMatrix::identity(3)
        ));

        // sign + trivial summand: fixed sublattice is the second coordinate
        let action = IntMatrix::from_i64(&[&[-1, 0], &[0, 1]]);
        let lat = GammaLattice::from_generator_actions(c2.clone(), &[action]).unwrap();
        let incl = h0_sub(&GammaModule::from_lattice(lat));
        assert!(crate::lattice::lattices_equal(
            incl.matrix(),
            &IntMatrix::from_i64(&[&[0], &[1]])
        ));
    }

    #[test]
    fn h1_examples() {
        let c2 = cyclic(2);
        // sign action on Z
        assert_eq!(h1(&sign_module(&c2)), FinAbGroup::cyclic(2));
        // regular representation: coinduced, so trivial
        assert_eq!(h1(&swap_module(&c2)), FinAbGroup::trivial());
        // trivial group
        let triv = Arc::new(FiniteGroup::trivial());
        let m = GammaModule::from_lattice(GammaLattice::trivial(triv, 2));
        assert_eq!(h1(&m), FinAbGroup::trivial());
    }

    #[test]
    fn h1_oracle_agrees() {
        let c2 = cyclic(2);
        for m in [sign_module(&c2), swap_module(&c2)] {
            assert_eq!(h1(&m), h1_oracle(&m).unwrap());
        }
        let c3 = cyclic(3);
        let regular = permutation_lattice(&c3, &[vec![1, 2, 0]]).unwrap();
        let m = GammaModule::from_lattice(regular);
        assert_eq!(h1(&m), FinAbGroup::trivial());
        assert_eq!(h1_oracle(&m).unwrap(), FinAbGroup::trivial());

        // trivial action of C2 on Z: Hom(C2, Z) = 0
        let m = GammaModule::from_lattice(GammaLattice::trivial(c2, 1));
        assert_eq!(h1(&m), FinAbGroup::trivial());
        assert_eq!(h1_oracle(&m).unwrap(), FinAbGroup::trivial());
    }

    #[test]
    fn h1_oracle_size_guard() {
        let c2 = cyclic(2);
        let big = GammaModule::from_lattice(GammaLattice::trivial(c2, 40));
        assert!(matches!(h1_oracle(&big), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn h1_with_torsion_coefficients() {
        // C2 trivial action on Z/2: H^1 = Hom(C2, Z/2) = Z/2
        let c2 = cyclic(2);
        let lat = GammaLattice::trivial(c2, 1);
        let m = GammaModule::new(lat, IntMatrix::from_i64(&[&[2]])).unwrap();
        assert_eq!(h1(&m), FinAbGroup::cyclic(2));
        assert_eq!(h1_oracle(&m).unwrap(), FinAbGroup::cyclic(2));
    }

    #[test]
    fn mod_n_examples() {
        let c2 = cyclic(2);
        let sign = sign_module(&c2);
        let m2 = mod_n(&sign, &BigInt::from(2));
        assert_eq!(m2.underlying(), &FinAbGroup::cyclic(2));
        assert_eq!(h0(&m2), FinAbGroup::cyclic(2)); // sign is trivial mod 2
        let m3 = mod_n(&sign, &BigInt::from(3));
        assert_eq!(m3.underlying(), &FinAbGroup::cyclic(3));
        assert_eq!(h0(&m3), FinAbGroup::trivial());
        let m1 = mod_n(&sign, &BigInt::one());
        assert!(m1.underlying().is_trivial());

        let swap = swap_module(&c2);
        let m = mod_n(&swap, &BigInt::from(2));
        assert_eq!(
            m.underlying(),
            &FinAbGroup::new(0, vec![BigInt::from(2), BigInt::from(2)]).unwrap()
        );
    }

    #[test]
    fn mod_n_respects_composition() {
        let c2 = cyclic(2);
        for (a, b) in [(2u32, 3u32), (4, 6), (12, 8)] {
            let sign = sign_module(&c2);
            let twice = mod_n(&mod_n(&sign, &BigInt::from(a)), &BigInt::from(b));
            let gcd = BigInt::from(a).gcd(&BigInt::from(b));
            let once = mod_n(&sign, &gcd);
            assert_eq!(twice.underlying(), once.underlying());
            assert_eq!(h0(&twice), h0(&once));
            assert_eq!(h1(&twice), h1(&once));
        }
    }

    #[test]
    fn kernel_and_cokernel_of_multiplication() {
        let triv = Arc::new(FiniteGroup::trivial());
        let z = GammaModule::from_lattice(GammaLattice::trivial(triv.clone(), 1));
        let times_n = GammaMap::new(z.clone(), z.clone(), IntMatrix::from_i64(&[&[5]])).unwrap();
        let (ker, _) = kernel_map(&times_n);
        assert!(ker.underlying().is_trivial());
        let coker = cokernel_map(&times_n);
        assert_eq!(coker.underlying(), &FinAbGroup::cyclic(5));
    }

    #[test]
    fn kernel_of_augmentation_is_sign_lattice() {
        let c2 = cyclic(2);
        let regular = swap_module(&c2);
        let trivial = GammaModule::from_lattice(GammaLattice::trivial(c2.clone(), 1));
        let aug = GammaMap::new(regular, trivial, IntMatrix::from_i64(&[&[1, 1]])).unwrap();
        let (ker, incl) = kernel_map(&aug);
        assert_eq!(ker.rank(), 1);
        let g = c2.generators()[0];
        assert_eq!(ker.ambient().act(g), &IntMatrix::from_i64(&[&[-1]]));
        assert!(crate::lattice::lattices_equal(
            incl.matrix(),
            &IntMatrix::from_i64(&[&[1], &[-1]])
        ));
    }

    #[test]
    fn composition_mismatch_is_reported() {
        let c2 = cyclic(2);
        let a = GammaModule::from_lattice(GammaLattice::trivial(c2.clone(), 1));
        let b = GammaModule::from_lattice(GammaLattice::trivial(c2.clone(), 2));
        let f = GammaMap::new(a.clone(), b.clone(), IntMatrix::from_i64(&[&[1], &[0]])).unwrap();
        let err = f.compose(&f).unwrap_err();
        assert!(matches!(err, Error::CompositionMismatch(_)));
    }

    #[test]
    fn module_requires_stable_relations() {
        let c2 = cyclic(2);
        // swap lattice with a relation lattice that is not swap-stable
        let swap = swap_module(&c2).ambient().clone();
        let unstable = IntMatrix::from_i64(&[&[2], &[0]]);
        assert!(GammaModule::new(swap.clone(), unstable).is_err());
        let stable = IntMatrix::from_i64(&[&[2, 0], &[0, 2]]);
        assert!(GammaModule::new(swap, stable).is_ok());
    }

    #[test]
    fn lattice_rejects_non_action() {
        let c2 = cyclic(2);
        // matrix of order 3 cannot represent an involution
        let bad = IntMatrix::from_i64(&[&[0, -1], &[1, -1]]);
        let err = GammaLattice::from_generator_actions(c2, &[bad]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn lattice_rejects_non_unimodular() {
        let c2 = cyclic(2);
        let bad = IntMatrix::from_i64(&[&[2]]);
        let err = GammaLattice::from_generator_actions(c2, &[bad]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn h1_invariant_factors_divide_group_order() {
        let c4 = cyclic(4);
        let sign = IntMatrix::from_i64(&[&[-1]]);
        let lat = GammaLattice::from_generator_actions(c4.clone(), &[sign]).unwrap();
        let m = GammaModule::from_lattice(lat);
        let h = h1(&m);
        let order = BigInt::from(4);
        for d in h.torsion() {
            assert!((&order % d).is_zero(), "{d} does not divide 4");
        }
        assert_eq!(h, h1_oracle(&m).unwrap());
    }
}
