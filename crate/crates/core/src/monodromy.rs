//! Branched coverings of the sphere as permutation data: constellations,
//! passports, genus bookkeeping, and intermediate coverings through block
//! systems.
//!
//! The fiber action is everything here. Stabilizers are computed through
//! Schreier generators on the orbit; the subgroup generated by a point
//! stabilizer together with caller-chosen words yields a block of
//! imprimitivity, and the induced action on its translates is the monodromy
//! of the intermediate covering.

use crate::error::{Error, Result};

/// A permutation of {0..n−1}, stored as the image table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    /// Builds from disjoint cycles over 1-based labels.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for window in 0..cycle.len() {
                let from = cycle[window];
                let to = cycle[(window + 1) % cycle.len()];
                if from == 0 || from > n || to == 0 || to > n {
                    return Err(Error::InvalidInput(format!(
                        "cycle label out of range 1..{}",
                        n
                    )));
                }
                if touched[from - 1] {
                    return Err(Error::InvalidInput("overlapping cycles".into()));
                }
                touched[from - 1] = true;
                images[from - 1] = to - 1;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// self followed by other.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm {
            images: self.images.iter().map(|&x| other.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycle lengths in decreasing order (fixed points included).
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                len += 1;
                x = self.images[x];
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    /// Cycles with 1-based labels, fixed points omitted, canonically ordered.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.images[x];
            }
            cycles.push(cycle);
        }
        cycles
    }
}

/// Combinatorial branched covering: permutations whose ordered product is
/// the identity and whose group acts transitively on the fiber.
#[derive(Clone, Debug)]
pub struct Constellation {
    degree: usize,
    sigma: Vec<Perm>,
}

/// One cycle-length multiset per branch point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Passport(pub Vec<Vec<usize>>);

/// Partition of the fiber into equal-size blocks permuted by every
/// generator.
#[derive(Clone, Debug)]
pub struct BlockSystem {
    degree: usize,
    blocks: Vec<Vec<usize>>,
}

impl BlockSystem {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_size(&self) -> usize {
        self.blocks.first().map_or(0, Vec::len)
    }

    /// Blocks with 1-based labels, for reports.
    pub fn blocks_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|x| x + 1).collect())
            .collect()
    }
}

impl Constellation {
    /// Validates both invariants: identity product (σ₁ applied first) and
    /// transitivity.
    pub fn new(degree: usize, sigma: Vec<Perm>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidInput("constellation needs degree ≥ 1".into()));
        }
        for s in &sigma {
            if s.degree() != degree {
                return Err(Error::InvalidInput(
                    "permutation degree differs from constellation degree".into(),
                ));
            }
        }
        let c = Constellation { degree, sigma };
        c.validate()?;
        Ok(c)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn branch_count(&self) -> usize {
        self.sigma.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.sigma
    }

    pub fn validate(&self) -> Result<()> {
        let mut prod = Perm::identity(self.degree);
        for s in &self.sigma {
            prod = prod.then(s);
        }
        if !prod.is_identity() {
            return Err(Error::NonIdentityProduct);
        }
        if !self.is_transitive() {
            return Err(Error::Intransitive);
        }
        Ok(())
    }

    fn is_transitive(&self) -> bool {
        let n = self.degree;
        let mut reached = vec![false; n];
        let mut stack = vec![0usize];
        reached[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for s in &self.sigma {
                for y in [s.apply(x), s.inverse().apply(x)] {
                    if !reached[y] {
                        reached[y] = true;
                        count += 1;
                        stack.push(y);
                    }
                }
            }
        }
        count == n
    }

    pub fn passport(&self) -> Passport {
        Passport(self.sigma.iter().map(Perm::cycle_type).collect())
    }

    /// Genus from 2 − 2g = 2n − Σ (cycle length − 1); data violating the
    /// parity or sign of this relation is rejected.
    pub fn genus(&self) -> Result<usize> {
        let n = self.degree as i64;
        let ramification: i64 = self
            .sigma
            .iter()
            .map(|s| s.cycle_type().iter().map(|&l| l as i64 - 1).sum::<i64>())
            .sum();
        let twice = 2 - 2 * n + ramification; // equals 2g − 2 + 2 − ... = 2g
        if twice < 0 || twice % 2 != 0 {
            return Err(Error::InvalidCovering(format!(
                "Riemann–Hurwitz gives 2g = {}",
                twice
            )));
        }
        Ok((twice / 2) as usize)
    }

    /// Stability of the passport under an involutive pairing of branch
    /// indices (0-based): every branch must share its cycle-length multiset
    /// with its partner.
    pub fn passport_stability(&self, pairing: &[usize]) -> Result<bool> {
        let k = self.sigma.len();
        if pairing.len() != k {
            return Err(Error::InvalidInput(
                "pairing length differs from branch count".into(),
            ));
        }
        for (i, &j) in pairing.iter().enumerate() {
            if j >= k || pairing[j] != i {
                return Err(Error::InvalidInput("pairing is not an involution".into()));
            }
        }
        let passport = self.passport();
        Ok(pairing
            .iter()
            .enumerate()
            .all(|(i, &j)| passport.0[i] == passport.0[j]))
    }

    /// Evaluates a word over generators: positive token j means σ_j
    /// (1-based), negative −j its inverse; tokens apply left to right.
    pub fn evaluate_word(&self, word: &[i64]) -> Result<Perm> {
        let mut acc = Perm::identity(self.degree);
        for &t in word {
            if t == 0 || t.unsigned_abs() as usize > self.sigma.len() {
                return Err(Error::MalformedWord(format!(
                    "token {} outside ±1..±{}",
                    t,
                    self.sigma.len()
                )));
            }
            let base = &self.sigma[t.unsigned_abs() as usize - 1];
            let step = if t > 0 { base.clone() } else { base.inverse() };
            acc = acc.then(&step);
        }
        Ok(acc)
    }

    /// The block of imprimitivity generated by the stabilizer of `basepoint`
    /// together with the given words: the orbit of the basepoint under
    /// H = ⟨Stab(basepoint), words⟩, with the block system formed by its
    /// translates. Always a valid system since H contains the stabilizer.
    pub fn block_closure(&self, basepoint: usize, extra_words: &[Vec<i64>]) -> Result<BlockSystem> {
        let n = self.degree;
        if basepoint >= n {
            return Err(Error::InvalidInput(format!(
                "basepoint {} outside 0..{}",
                basepoint, n
            )));
        }
        self.validate()?;
        let mut h_gens: Vec<Perm> = Vec::new();
        for w in extra_words {
            h_gens.push(self.evaluate_word(w)?);
        }
        h_gens.extend(self.schreier_stabilizer_generators(basepoint));

        // block = orbit of the basepoint under H
        let block = orbit(n, &h_gens, basepoint);

        // translates under the full group
        let gens_with_inverses: Vec<Perm> = self
            .sigma
            .iter()
            .flat_map(|s| [s.clone(), s.inverse()])
            .collect();
        let mut block_of = vec![usize::MAX; n];
        let mut blocks: Vec<Vec<usize>> = vec![block.clone()];
        for &x in &block {
            block_of[x] = 0;
        }
        let mut queue = vec![0usize];
        while let Some(b) = queue.pop() {
            let current = blocks[b].clone();
            for g in &gens_with_inverses {
                let image: Vec<usize> = {
                    let mut v: Vec<usize> = current.iter().map(|&x| g.apply(x)).collect();
                    v.sort_unstable();
                    v
                };
                let rep = image[0];
                if block_of[rep] == usize::MAX {
                    let id = blocks.len();
                    for &x in &image {
                        if block_of[x] != usize::MAX {
                            return Err(Error::Internal(
                                "stabilizer-closed orbit failed to induce a partition".into(),
                            ));
                        }
                        block_of[x] = id;
                    }
                    blocks.push(image);
                    queue.push(id);
                } else {
                    let id = block_of[rep];
                    if blocks[id] != image {
                        return Err(Error::Internal(
                            "stabilizer-closed orbit failed to induce a partition".into(),
                        ));
                    }
                }
            }
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(BlockSystem { degree: n, blocks })
    }

    // Schreier generators of Stab(basepoint) from the transitive action:
    // u_x · s · u_{s(x)}⁻¹ over coset representatives u_x.
    fn schreier_stabilizer_generators(&self, basepoint: usize) -> Vec<Perm> {
        let n = self.degree;
        let gens_with_inverses: Vec<Perm> = self
            .sigma
            .iter()
            .flat_map(|s| [s.clone(), s.inverse()])
            .collect();
        let mut reps: Vec<Option<Perm>> = vec![None; n];
        reps[basepoint] = Some(Perm::identity(n));
        let mut queue = vec![basepoint];
        while let Some(x) = queue.pop() {
            let ux = reps[x].clone().unwrap();
            for g in &gens_with_inverses {
                let y = g.apply(x);
                if reps[y].is_none() {
                    reps[y] = Some(ux.then(g));
                    queue.push(y);
                }
            }
        }
        let mut out = Vec::new();
        for x in 0..n {
            let ux = match &reps[x] {
                Some(u) => u,
                None => continue, // unreachable for transitive actions
            };
            for g in &gens_with_inverses {
                let y = g.apply(x);
                let uy_inv = reps[y].as_ref().unwrap().inverse();
                let schreier = ux.then(g).then(&uy_inv);
                if !schreier.is_identity() && !out.contains(&schreier) {
                    out.push(schreier);
                }
            }
        }
        out
    }

    /// Induced constellation on the blocks; degrees multiply:
    /// n = block size × quotient degree.
    pub fn quotient(&self, system: &BlockSystem) -> Result<Constellation> {
        if system.degree != self.degree {
            return Err(Error::InvalidInput(
                "block system degree differs from constellation degree".into(),
            ));
        }
        let mut block_of = vec![usize::MAX; self.degree];
        for (id, b) in system.blocks.iter().enumerate() {
            for &x in b {
                block_of[x] = id;
            }
        }
        if block_of.iter().any(|&b| b == usize::MAX) {
            return Err(Error::InvalidInput("block system misses points".into()));
        }
        let k = system.blocks.len();
        let mut quotient_sigma = Vec::with_capacity(self.sigma.len());
        for (gi, s) in self.sigma.iter().enumerate() {
            let mut images = vec![usize::MAX; k];
            for (id, b) in system.blocks.iter().enumerate() {
                let target = block_of[s.apply(b[0])];
                for &x in b {
                    if block_of[s.apply(x)] != target {
                        return Err(Error::BlocksNotPreserved(gi));
                    }
                }
                images[id] = target;
            }
            quotient_sigma.push(Perm::from_images(images)?);
        }
        Constellation::new(k, quotient_sigma)
    }
}

fn orbit(n: usize, gens: &[Perm], start: usize) -> Vec<usize> {
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = vec![start];
    let mut out = vec![start];
    while let Some(x) = queue.pop() {
        for g in gens {
            for y in [g.apply(x), g.inverse().apply(x)] {
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push(y);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_constellation() -> Constellation {
        let s = Perm::from_cycles(2, &[vec![1, 2]]).unwrap();
        Constellation::new(2, vec![s.clone(), s]).unwrap()
    }

    fn z4_cyclic() -> Constellation {
        let s0 = Perm::from_cycles(4, &[vec![1, 2, 3, 4]]).unwrap();
        let sinf = Perm::from_cycles(4, &[vec![1, 4, 3, 2]]).unwrap();
        Constellation::new(4, vec![s0, sinf]).unwrap()
    }

    #[test]
    fn validation_examples() {
        // the z² covering validates
        z2_constellation();
        // non-identity product
        let s = Perm::from_cycles(2, &[vec![1, 2]]).unwrap();
        let id = Perm::identity(2);
        assert!(matches!(
            Constellation::new(2, vec![s.clone(), id]),
            Err(Error::NonIdentityProduct)
        ));
        // intransitive
        let a = Perm::from_cycles(4, &[vec![1, 2]]).unwrap();
        let b = Perm::from_cycles(4, &[vec![3, 4]]).unwrap();
        assert!(matches!(
            Constellation::new(4, vec![a.clone(), a, b.clone(), b]),
            Err(Error::Intransitive)
        ));
    }

    #[test]
    fn genus_examples() {
        assert_eq!(z2_constellation().genus().unwrap(), 0);
        // four transpositions on two sheets: the torus
        let s = Perm::from_cycles(2, &[vec![1, 2]]).unwrap();
        let c = Constellation::new(2, vec![s.clone(), s.clone(), s.clone(), s]).unwrap();
        assert_eq!(c.genus().unwrap(), 1);
        // cubic covering with passport [2,1],[2,1],[3]
        let a = Perm::from_cycles(3, &[vec![1, 2]]).unwrap();
        let b = Perm::from_cycles(3, &[vec![2, 3]]).unwrap();
        let cinf = a.then(&b).inverse();
        let c = Constellation::new(3, vec![a, b, cinf.clone()]).unwrap();
        assert_eq!(cinf.cycle_type(), vec![3]);
        assert_eq!(c.genus().unwrap(), 0);
    }

    #[test]
    fn passport_stability_examples() {
        let c = z2_constellation();
        assert!(c.passport_stability(&[1, 0]).unwrap());
        // passport [[2,1],[2,1],[3]] with a swap of the first two branches
        let a = Perm::from_cycles(3, &[vec![1, 2]]).unwrap();
        let b = Perm::from_cycles(3, &[vec![2, 3]]).unwrap();
        let cinf = a.then(&b).inverse();
        let c = Constellation::new(3, vec![a.clone(), b, cinf]).unwrap();
        assert!(c.passport_stability(&[1, 0, 2]).unwrap());
        // mismatched multisets under the pairing
        let b3 = Perm::from_cycles(3, &[vec![1, 2, 3]]).unwrap();
        let rest = a.then(&b3).inverse();
        let c = Constellation::new(3, vec![a, b3, rest]).unwrap();
        assert!(!c.passport_stability(&[1, 0, 2]).unwrap());
        // identity pairing is always stable
        assert!(c.passport_stability(&[0, 1, 2]).unwrap());
        // non-involutive pairing rejected
        assert!(c.passport_stability(&[1, 2, 0]).is_err());
    }

    #[test]
    fn block_closure_of_cyclic_cover() {
        // σ₀² generates the subgroup ⟨(13)(24)⟩; blocks {1,3} and {2,4}
        let c = z4_cyclic();
        let blocks = c.block_closure(0, &[vec![1, 1]]).unwrap();
        assert_eq!(blocks.blocks_one_based(), vec![vec![1, 3], vec![2, 4]]);
        assert_eq!(blocks.block_size(), 2);
    }

    #[test]
    fn block_closure_trivial_cases() {
        let c = z4_cyclic();
        // no extra words and trivial stabilizer: singleton blocks
        let singletons = c.block_closure(0, &[]).unwrap();
        assert_eq!(singletons.blocks().len(), 4);
        assert_eq!(singletons.block_size(), 1);
        // words generating everything: one block
        let whole = c.block_closure(0, &[vec![1]]).unwrap();
        assert_eq!(whole.blocks().len(), 1);
        assert_eq!(whole.block_size(), 4);
    }

    #[test]
    fn quotient_of_cyclic_cover_is_square() {
        let c = z4_cyclic();
        let blocks = c.block_closure(0, &[vec![1, 1]]).unwrap();
        let q = c.quotient(&blocks).unwrap();
        assert_eq!(q.degree(), 2);
        assert_eq!(q.passport(), z2_constellation().passport());
        // degree multiplicativity 4 = 2 × 2
        assert_eq!(c.degree(), blocks.block_size() * q.degree());
        // genus stays consistent at both levels
        assert_eq!(q.genus().unwrap(), 0);
    }

    #[test]
    fn quotient_degenerate_blocks() {
        let c = z4_cyclic();
        let singletons = c.block_closure(0, &[]).unwrap();
        let q = c.quotient(&singletons).unwrap();
        assert_eq!(q.degree(), 4);
        let whole = c.block_closure(0, &[vec![1]]).unwrap();
        let q = c.quotient(&whole).unwrap();
        assert_eq!(q.degree(), 1);
    }

    #[test]
    fn quotient_rejects_non_blocks() {
        let c = z4_cyclic();
        let bad = BlockSystem {
            degree: 4,
            blocks: vec![vec![0, 1], vec![2, 3]],
        };
        assert!(matches!(
            c.quotient(&bad),
            Err(Error::BlocksNotPreserved(_))
        ));
    }

    #[test]
    fn block_closure_is_generator_stable() {
        let a = Perm::from_cycles(6, &[vec![1, 2, 3, 4, 5, 6]]).unwrap();
        let b = a.inverse();
        let c = Constellation::new(6, vec![a, b]).unwrap();
        let blocks = c.block_closure(0, &[vec![1, 1, 1]]).unwrap();
        assert_eq!(blocks.block_size(), 2);
        for g in c.generators() {
            for block in blocks.blocks() {
                let mut image: Vec<usize> = block.iter().map(|&x| g.apply(x)).collect();
                image.sort_unstable();
                assert!(blocks.blocks().contains(&image));
            }
        }
    }

    #[test]
    fn malformed_words_rejected() {
        let c = z2_constellation();
        assert!(matches!(
            c.evaluate_word(&[0]),
            Err(Error::MalformedWord(_))
        ));
        assert!(matches!(
            c.evaluate_word(&[3]),
            Err(Error::MalformedWord(_))
        ));
        assert!(c.evaluate_word(&[1, -1]).unwrap().is_identity());
    }
}
