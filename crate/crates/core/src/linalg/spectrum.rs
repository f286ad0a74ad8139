use num_complex::Complex64;

/// Multiset of eigenvalues of a real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(values: Vec<Complex64>) -> Self {
        Spectrum { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest magnitude; 0 for the empty spectrum.
    pub fn radius(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalue of largest magnitude.
    pub fn dominant(&self) -> Option<Complex64> {
        self.values
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
    }

    /// Values ordered by real part, then imaginary part.
    pub fn sorted(&self) -> Vec<Complex64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    /// Multiset union.
    pub fn union(&self, other: &Spectrum) -> Spectrum {
        let mut v = self.values.clone();
        v.extend_from_slice(&other.values);
        Spectrum::new(v)
    }

    /// True when the multiset equals its elementwise conjugate within `tol`.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        let conj: Vec<Complex64> = self.values.iter().map(|z| z.conj()).collect();
        pairing_distance(&self.values, &conj).is_some_and(|d| d <= tol)
    }

    /// Coefficients of `∏(z − λᵢ)`, leading coefficient first. Imaginary
    /// parts, which cancel for conjugate-closed input, are dropped.
    pub fn monic_poly(&self) -> Vec<f64> {
        poly_from_roots(&self.values)
    }

    /// Groups eigenvalues whose mutual distance is within
    /// `tol · max(1, |λ|)` (single linkage). Each cluster is reported with
    /// its mean and the indices of its members.
    pub fn clusters(&self, tol: f64) -> Vec<(Complex64, Vec<usize>)> {
        let n = self.values.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (self.values[i], self.values[j]);
                if (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[rj] = ri;
                    }
                }
            }
        }
        let mut groups: Vec<(usize, Complex64, Vec<usize>)> = Vec::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            match groups.iter_mut().find(|g| g.0 == r) {
                Some(g) => {
                    g.1 += self.values[i];
                    g.2.push(i);
                }
                None => groups.push((r, self.values[i], vec![i])),
            }
        }
        groups
            .into_iter()
            .map(|(_, sum, members)| (sum / members.len() as f64, members))
            .collect()
    }
}

/// Monic polynomial coefficients (highest degree first) from roots.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i] += ci;
            next[i + 1] -= ci * r;
        }
        c = next;
    }
    c.into_iter().map(|z| z.re).collect()
}

/// Smallest achievable maximum distance over all one-to-one pairings of two
/// multisets (bottleneck assignment). `None` when the sizes differ.
pub fn pairing_distance(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    if n == 0 {
        return Some(0.0);
    }
    let dist: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let mut candidates: Vec<f64> = dist.iter().flatten().copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(&dist, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(candidates[lo])
}

fn has_perfect_matching(dist: &[Vec<f64>], threshold: f64) -> bool {
    let n = dist.len();
    let mut match_of_b: Vec<Option<usize>> = vec![None; n];
    fn augment(
        i: usize,
        dist: &[Vec<f64>],
        threshold: f64,
        seen: &mut [bool],
        match_of_b: &mut [Option<usize>],
    ) -> bool {
        for j in 0..dist.len() {
            if dist[i][j] <= threshold && !seen[j] {
                seen[j] = true;
                let free = match match_of_b[j] {
                    None => true,
                    Some(k) => augment(k, dist, threshold, seen, match_of_b),
                };
                if free {
                    match_of_b[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|i| {
        let mut seen = vec![false; n];
        augment(i, dist, threshold, &mut seen, &mut match_of_b)
    })
}
