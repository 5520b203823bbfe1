//! Two-state switching structure: the model container, the exponent
//! matrix of the jump regime with its explicit eigen-decomposition, and the
//! renewal kernel.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::levy::{Domain, LevyBlock, ScalarLaw};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    /// Restart from a fresh point `x_n ~ g_i` at every switch.
    Renewal,
    /// Keep the current value and add a jump `Y ~ h_i` when leaving state `i`.
    Jump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    Renewal { g0: ScalarLaw, g1: ScalarLaw },
    Jump { h0: ScalarLaw, h1: ScalarLaw },
}

/// Serialized form of a [`RegimeModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub variant: VariantKind,
    pub lambda: [f64; 2],
    pub blocks: [LevyBlock; 2],
    pub laws: [ScalarLaw; 2],
}

/// A two-state Markov-modulated Lévy process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub struct RegimeModel {
    lambda0: f64,
    lambda1: f64,
    block0: LevyBlock,
    block1: LevyBlock,
    variant: Variant,
}

impl TryFrom<ModelSpec> for RegimeModel {
    type Error = Error;

    fn try_from(s: ModelSpec) -> Result<Self> {
        let variant = match s.variant {
            VariantKind::Renewal => Variant::Renewal {
                g0: s.laws[0],
                g1: s.laws[1],
            },
            VariantKind::Jump => Variant::Jump {
                h0: s.laws[0],
                h1: s.laws[1],
            },
        };
        RegimeModel::new(s.lambda[0], s.lambda[1], s.blocks[0], s.blocks[1], variant)
    }
}

impl From<RegimeModel> for ModelSpec {
    fn from(m: RegimeModel) -> Self {
        let (variant, laws) = match m.variant {
            Variant::Renewal { g0, g1 } => (VariantKind::Renewal, [g0, g1]),
            Variant::Jump { h0, h1 } => (VariantKind::Jump, [h0, h1]),
        };
        ModelSpec {
            variant,
            lambda: [m.lambda0, m.lambda1],
            blocks: [m.block0, m.block1],
            laws,
        }
    }
}

impl RegimeModel {
    pub fn new(
        lambda0: f64,
        lambda1: f64,
        block0: LevyBlock,
        block1: LevyBlock,
        variant: Variant,
    ) -> Result<Self> {
        for (name, l) in [("lambda0", lambda0), ("lambda1", lambda1)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(invalid(format!("{name} must be > 0")));
            }
        }
        block0
            .validate()
            .map_err(|e| invalid(format!("block0: {}", strip(&e))))?;
        block1
            .validate()
            .map_err(|e| invalid(format!("block1: {}", strip(&e))))?;
        let (l0, l1) = match variant {
            Variant::Renewal { g0, g1 } => (g0, g1),
            Variant::Jump { h0, h1 } => (h0, h1),
        };
        l0.validate()
            .map_err(|e| invalid(format!("law0: {}", strip(&e))))?;
        l1.validate()
            .map_err(|e| invalid(format!("law1: {}", strip(&e))))?;
        Ok(Self {
            lambda0,
            lambda1,
            block0,
            block1,
            variant,
        })
    }

    pub fn renewal(
        lambda0: f64,
        lambda1: f64,
        block0: LevyBlock,
        block1: LevyBlock,
        g0: ScalarLaw,
        g1: ScalarLaw,
    ) -> Result<Self> {
        Self::new(
            lambda0,
            lambda1,
            block0,
            block1,
            Variant::Renewal { g0, g1 },
        )
    }

    pub fn jump(
        lambda0: f64,
        lambda1: f64,
        block0: LevyBlock,
        block1: LevyBlock,
        h0: ScalarLaw,
        h1: ScalarLaw,
    ) -> Result<Self> {
        Self::new(lambda0, lambda1, block0, block1, Variant::Jump { h0, h1 })
    }

    /// Jump-telegraph model: drifts `c_i` and deterministic switch jumps `y_i`.
    pub fn jump_telegraph(
        lambda0: f64,
        lambda1: f64,
        c0: f64,
        c1: f64,
        y0: f64,
        y1: f64,
    ) -> Result<Self> {
        Self::jump(
            lambda0,
            lambda1,
            LevyBlock::Drift { c: c0 },
            LevyBlock::Drift { c: c1 },
            ScalarLaw::Dirac { y: y0 },
            ScalarLaw::Dirac { y: y1 },
        )
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambdas(&self) -> [f64; 2] {
        [self.lambda0, self.lambda1]
    }

    /// λ = (λ0 + λ1)/2.
    pub fn lambda_mean(&self) -> f64 {
        0.5 * (self.lambda0 + self.lambda1)
    }

    /// μ = (λ0 − λ1)/2.
    pub fn lambda_half_diff(&self) -> f64 {
        0.5 * (self.lambda0 - self.lambda1)
    }

    pub fn block(&self, regime: usize) -> &LevyBlock {
        if regime == 0 {
            &self.block0
        } else {
            &self.block1
        }
    }

    pub fn blocks(&self) -> [LevyBlock; 2] {
        [self.block0, self.block1]
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn kind(&self) -> VariantKind {
        match self.variant {
            Variant::Renewal { .. } => VariantKind::Renewal,
            Variant::Jump { .. } => VariantKind::Jump,
        }
    }

    /// The law attached to regime `i`: restart law or jump law.
    pub fn law(&self, regime: usize) -> &ScalarLaw {
        match &self.variant {
            Variant::Renewal { g0, g1 } | Variant::Jump { h0: g0, h1: g1 } => {
                if regime == 0 {
                    g0
                } else {
                    g1
                }
            }
        }
    }

    pub fn start_laws(&self) -> Result<[ScalarLaw; 2]> {
        match self.variant {
            Variant::Renewal { g0, g1 } => Ok([g0, g1]),
            _ => Err(Error::WrongVariant {
                expected: "renewal",
            }),
        }
    }

    pub fn jump_laws(&self) -> Result<[ScalarLaw; 2]> {
        match self.variant {
            Variant::Jump { h0, h1 } => Ok([h0, h1]),
            _ => Err(Error::WrongVariant { expected: "jump" }),
        }
    }

    /// Arguments ξ at which both blocks and both jump laws have finite Laplace transforms.
    pub fn laplace_domain(&self) -> Domain {
        let mut d = self
            .block0
            .laplace_domain()
            .intersect(&self.block1.laplace_domain());
        if let Variant::Jump { h0, h1 } = self.variant {
            d = d
                .intersect(&h0.laplace_domain())
                .intersect(&h1.laplace_domain());
        }
        d
    }

    pub fn has_formal_block(&self) -> bool {
        self.block0.is_formal() || self.block1.is_formal()
    }
}

fn strip(e: &Error) -> String {
    match e {
        Error::InvalidParams(m) | Error::UnsupportedDomain(m) | Error::InvalidCase(m) => m.clone(),
        other => other.to_string(),
    }
}

/// The 2×2 matrix `[[λ0+ℓ0, −λ0h̃0], [−λ1h̃1, λ1+ℓ1]]` whose negative
/// generates the Laplace transform of the jump regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentMatrix {
    pub entries: [[f64; 2]; 2],
}

/// Explicit eigen-decomposition of an [`ExponentMatrix`]: `1 = e1 + e2`
/// with `𝓛 e_k = α_k e_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenData {
    pub alpha1: f64,
    pub alpha2: f64,
    pub e1: [f64; 2],
    pub e2: [f64; 2],
    /// Discriminant root `D = (α2 − α1)/2`.
    pub d: f64,
}

impl ExponentMatrix {
    pub fn new(entries: [[f64; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn det(&self) -> f64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = &self.entries;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Eigen-data from the explicit two-state formulas. With diagonal
    /// `d_i` and off-diagonal `−o_i`:
    /// `D = sqrt(((d0−d1)/2)² + o0·o1)`, `α_{1,2} = (d0+d1)/2 ∓ D`,
    /// `e1 = ½(1 − (δ − o0)/D, 1 + (δ + o1)/D)`, `e2 = 1 − e1`, `δ = (d0−d1)/2`.
    pub fn eigen_data(&self) -> Result<EigenData> {
        let m = &self.entries;
        let half_sum = 0.5 * (m[0][0] + m[1][1]);
        let half_diff = 0.5 * (m[0][0] - m[1][1]);
        let o0 = -m[0][1];
        let o1 = -m[1][0];
        let d2 = half_diff * half_diff + o0 * o1;
        if !(d2 > 0.0) || !d2.is_finite() {
            return Err(invalid(format!(
                "discriminant D^2 = {d2} must be positive and finite"
            )));
        }
        let d = d2.sqrt();
        let u0 = (half_diff - o0) / d;
        let u1 = (half_diff + o1) / d;
        Ok(EigenData {
            alpha1: half_sum - d,
            alpha2: half_sum + d,
            e1: [0.5 * (1.0 - u0), 0.5 * (1.0 + u1)],
            e2: [0.5 * (1.0 + u0), 0.5 * (1.0 - u1)],
            d,
        })
    }
}

/// `𝓛(ξ)` for a jump-regime model.
///
/// Negated stable blocks are accepted here (their formal exponent is what the
/// finiteness criteria need); the transform functions reject them.
pub fn exponent_matrix(model: &RegimeModel, xi: f64) -> Result<ExponentMatrix> {
    let [h0, h1] = model.jump_laws()?;
    let l0 = model.block0.laplace_exponent(xi)?;
    let l1 = model.block1.laplace_exponent(xi)?;
    let ht0 = h0.laplace(xi)?;
    let ht1 = h1.laplace(xi)?;
    Ok(ExponentMatrix::new([
        [model.lambda0 + l0, -model.lambda0 * ht0],
        [-model.lambda1 * ht1, model.lambda1 + l1],
    ]))
}

pub fn eigen_data(matrix: &ExponentMatrix) -> Result<EigenData> {
    matrix.eigen_data()
}

/// Renewal kernel `𝓑(t)`.
pub fn renewal_kernel(model: &RegimeModel, t: f64) -> Result<[[f64; 2]; 2]> {
    if !(t >= 0.0) {
        return Err(invalid("t must be >= 0"));
    }
    let (l0, l1) = (model.lambda0, model.lambda1);
    let two_lambda = l0 + l1;
    let e = (-two_lambda * t).exp();
    let s = 1.0 / two_lambda;
    Ok([
        [s * (1.0 - e), s * (1.0 + l0 / l1 * e)],
        [s * (1.0 + l1 / l0 * e), s * (1.0 - e)],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{JumpOrientation, Sign};

    pub(crate) fn fig3() -> RegimeModel {
        RegimeModel::jump_telegraph(1.0, 1.0, 2.0, -0.1, -0.5, 0.5).unwrap()
    }

    #[test]
    fn validation() {
        let e = RegimeModel::jump_telegraph(-1.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap_err();
        assert_eq!(e, Error::InvalidParams("lambda0 must be > 0".into()));
        assert!(RegimeModel::jump_telegraph(1.0, 0.0, 1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn matrix_at_zero_is_generator() {
        let m = exponent_matrix(&fig3(), 0.0).unwrap();
        assert_eq!(m.entries, [[1.0, -1.0], [-1.0, 1.0]]);
        let ed = m.eigen_data().unwrap();
        assert!(ed.alpha1.abs() < 1e-15);
        assert!((ed.alpha2 - 2.0).abs() < 1e-15);
        assert!((ed.e1[0] - 1.0).abs() < 1e-15 && (ed.e1[1] - 1.0).abs() < 1e-15);
        assert!(ed.e2[0].abs() < 1e-15 && ed.e2[1].abs() < 1e-15);
    }

    #[test]
    fn fig3_matrix_entries() {
        let m = exponent_matrix(&fig3(), 1.0).unwrap();
        let e = m.entries;
        assert!((e[0][0] - 3.0).abs() < 1e-15);
        assert!((e[0][1] + 0.5f64.exp()).abs() < 1e-15);
        assert!((e[1][0] + (-0.5f64).exp()).abs() < 1e-15);
        assert!((e[1][1] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn fig3_eigenvalues_match_quadratic_formula() {
        let m = exponent_matrix(&fig3(), 1.0).unwrap();
        let ed = m.eigen_data().unwrap();
        // independent route: roots of x² − tr·x + det
        let (tr, det): (f64, f64) = (3.0 + 0.9, 3.0 * 0.9 - 1.0);
        let disc = (tr * tr - 4.0 * det).sqrt();
        let (r1, r2) = ((tr - disc) / 2.0, (tr + disc) / 2.0);
        assert!((ed.alpha1 - r1).abs() < 1e-12);
        assert!((ed.alpha2 - r2).abs() < 1e-12);
    }

    #[test]
    fn symmetric_identical_regimes() {
        let b = LevyBlock::BrownianDrift { c: 0.3, sigma: 0.8 };
        let m = RegimeModel::jump(1.7, 1.7, b, b, ScalarLaw::ZERO, ScalarLaw::ZERO).unwrap();
        for xi in [-1.0, 0.2, 1.5] {
            let ed = exponent_matrix(&m, xi).unwrap().eigen_data().unwrap();
            let l = b.laplace_exponent(xi).unwrap();
            assert!((ed.d - 1.7).abs() < 1e-14);
            assert!((ed.alpha1 - l).abs() < 1e-13);
            assert!((ed.alpha2 - (l + 3.4)).abs() < 1e-13);
        }
    }

    #[test]
    fn wrong_variant() {
        let m = RegimeModel::renewal(
            1.0,
            1.0,
            LevyBlock::Drift { c: 1.0 },
            LevyBlock::Drift { c: 1.0 },
            ScalarLaw::ZERO,
            ScalarLaw::ZERO,
        )
        .unwrap();
        assert_eq!(
            exponent_matrix(&m, 0.5).unwrap_err(),
            Error::WrongVariant { expected: "jump" }
        );
    }

    #[test]
    fn renewal_kernel_limits() {
        let m = RegimeModel::renewal(
            2.0,
            1.0,
            LevyBlock::Drift { c: 1.0 },
            LevyBlock::Drift { c: -1.0 },
            ScalarLaw::ZERO,
            ScalarLaw::ZERO,
        )
        .unwrap();
        let b0 = renewal_kernel(&m, 0.0).unwrap();
        let s = 1.0 / 3.0;
        assert_eq!(b0[0][0], 0.0);
        assert!((b0[0][1] - s * 3.0).abs() < 1e-15);
        assert!((b0[1][0] - s * 1.5).abs() < 1e-15);
        let binf = renewal_kernel(&m, 60.0).unwrap();
        for row in binf {
            for v in row {
                assert!((v - s).abs() < 1e-15);
            }
        }
        assert!(renewal_kernel(&m, -1.0).is_err());
    }

    /// Numerical Laplace transform of 𝓑(t) against the resolvent of the
    /// algebraic renewal system.
    #[test]
    fn renewal_kernel_matches_resolvent() {
        let m = RegimeModel::renewal(
            2.0,
            1.0,
            LevyBlock::Drift { c: 1.0 },
            LevyBlock::Drift { c: -1.0 },
            ScalarLaw::ZERO,
            ScalarLaw::ZERO,
        )
        .unwrap();
        let (l0, l1) = (2.0, 1.0);
        for s in [0.5, 1.0, 3.0] {
            // π0 = Q0 + k0 π1, π1 = Q1 + k1 π0 with k_i = λ_i/(λ_i+s);
            // the solution is π = R Q and λ0λ1 B̂(s) must equal R − I.
            let k0 = l0 / (l0 + s);
            let k1 = l1 / (l1 + s);
            let det = 1.0 - k0 * k1;
            let res = [[1.0 / det - 1.0, k0 / det], [k1 / det, 1.0 / det - 1.0]];
            for i in 0..2 {
                for j in 0..2 {
                    let lt = crate::quad::integrate_to_inf(
                        |t| (-s * t).exp() * renewal_kernel(&m, t).unwrap()[i][j],
                        0.0,
                        1e-13,
                    );
                    let lhs = l0 * l1 * lt;
                    let rhs = res[i][j];
                    assert!((lhs - rhs).abs() < 1e-10, "s={s} i={i} j={j} {lhs} {rhs}");
                }
            }
        }
    }

    #[test]
    fn serde_roundtrip() {
        let m = RegimeModel::jump(
            2.0,
            1.0,
            LevyBlock::CompoundPoissonExp {
                c: 1.0,
                nu: 0.5,
                a: 2.0,
                orientation: JumpOrientation::Positive,
            },
            LevyBlock::StableSubordinator {
                a: 1.0,
                alpha: 0.5,
                sign: Sign::Plus,
            },
            ScalarLaw::Dirac { y: -0.5 },
            ScalarLaw::Dirac { y: 0.5 },
        )
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: RegimeModel = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn jump_model() -> impl Strategy<Value = RegimeModel> {
            (
                0.1..5.0f64,
                0.1..5.0f64,
                -3.0..3.0f64,
                0.0..2.0f64,
                -3.0..3.0f64,
                0.0..2.0f64,
                -1.0..1.0f64,
                0.5..4.0f64,
            )
                .prop_map(|(l0, l1, c0, s0, c1, nu1, y0, a1)| {
                    RegimeModel::jump(
                        l0,
                        l1,
                        LevyBlock::BrownianDrift { c: c0, sigma: s0 },
                        LevyBlock::CompoundPoissonExp {
                            c: c1,
                            nu: nu1,
                            a: a1,
                            orientation: JumpOrientation::Positive,
                        },
                        ScalarLaw::Dirac { y: y0 },
                        ScalarLaw::Exponential {
                            rate: a1 + 1.0,
                            sign: JumpOrientation::Positive,
                        },
                    )
                    .unwrap()
                })
        }

        proptest! {
            #[test]
            fn eigen_residual_and_sum(m in jump_model(), xi in -0.45..3.0f64) {
                let mat = exponent_matrix(&m, xi).unwrap();
                let ed = mat.eigen_data().unwrap();
                for (alpha, e) in [(ed.alpha1, ed.e1), (ed.alpha2, ed.e2)] {
                    let le = mat.apply(e);
                    let scale = mat.entries.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
                    for k in 0..2 {
                        prop_assert!((le[k] - alpha * e[k]).abs() <= 1e-10 * scale.max(1.0));
                    }
                }
                prop_assert!((ed.e1[0] + ed.e2[0] - 1.0).abs() < 1e-15);
                prop_assert!((ed.e1[1] + ed.e2[1] - 1.0).abs() < 1e-15);
                prop_assert!(ed.alpha1 <= ed.alpha2);
                let tr = mat.trace();
                prop_assert!((ed.alpha1 + ed.alpha2 - tr).abs() <= 1e-12 * tr.abs().max(1.0));
                let det = mat.det();
                prop_assert!((ed.alpha1 * ed.alpha2 - det).abs() <= 1e-10 * (ed.alpha2 * ed.alpha2).max(1.0));
            }

            #[test]
            fn determinant_identity(m in jump_model(), xi in -0.45..3.0f64) {
                let mat = exponent_matrix(&m, xi).unwrap();
                let [b0, b1] = m.blocks();
                let [h0, h1] = m.jump_laws().unwrap();
                let (l0, l1) = (b0.laplace_exponent(xi).unwrap(), b1.laplace_exponent(xi).unwrap());
                let (la0, la1) = (m.lambda0(), m.lambda1());
                let expected = l0 * l1 + la0 * l1 + la1 * l0
                    + la0 * la1 * (1.0 - h0.laplace(xi).unwrap() * h1.laplace(xi).unwrap());
                let scale = (la0 + l0.abs()) * (la1 + l1.abs());
                prop_assert!((mat.det() - expected).abs() <= 1e-12 * scale.max(1.0));
            }

            #[test]
            fn zero_mode_at_origin(m in jump_model()) {
                let ed = exponent_matrix(&m, 0.0).unwrap().eigen_data().unwrap();
                prop_assert!(ed.alpha1.abs() <= 1e-14 * m.lambda_mean());
            }
        }
    }
}
