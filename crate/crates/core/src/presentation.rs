//! A divisor `X ⊂ M` seen through its restriction functor.
//!
//! The source lattice `C` belongs to `M` with its rectangular block of length
//! `m = ind(M)`; the target `D` belongs to `X` with block length `m - d`.
//! Restriction `psi` and pushforward `psi_right` are given as matrices; every
//! other operator is derived from these, the twists `alpha` and the pairings.

use num_integer::Integer;

use crate::lattice::{LatticeError, LatticeOperator, LatticeResult, NumLattice, Residual, Side, VerificationReport};
use crate::linalg::unit_vector;
use crate::{Int, IntMatrix};

/// Source and target lattices joined by restriction and pushforward.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub name: String,
    pub source: NumLattice,
    pub target: NumLattice,
    /// `target.rank x source.rank`.
    pub psi: IntMatrix,
    /// `source.rank x target.rank`.
    pub psi_right: IntMatrix,
    /// Degree of the divisor.
    pub degree: i64,
}

/// Residual operators on one side of a presentation.
#[derive(Debug, Clone)]
pub struct SideOperators {
    pub residual: Residual,
    /// Serre operator from mutating `S^-1` back into the residual.
    pub serre_mutation: LatticeOperator,
    /// Serre operator as `s o rotation^-(block length)`.
    pub serre_rotation: LatticeOperator,
    /// Rotation restricted to the residual.
    pub rotation: LatticeOperator,
    pub s: LatticeOperator,
    pub t: LatticeOperator,
    /// Residual spherical twist as `rotation^-d o t`.
    pub twist_rotation: LatticeOperator,
    /// Residual spherical twist from the adjunction triangle.
    pub twist_mutation: LatticeOperator,
}

/// All residual operators of a presentation.
#[derive(Debug, Clone)]
pub struct ResidualSuite {
    pub source: SideOperators,
    pub target: SideOperators,
    /// Restriction between residuals, in residual coordinates.
    pub psi_r: IntMatrix,
    /// Right adjoint of `psi_r`, in residual coordinates.
    pub psi_r_right: IntMatrix,
}

impl Presentation {
    pub fn new(
        name: impl Into<String>,
        source: NumLattice,
        target: NumLattice,
        psi: IntMatrix,
        psi_right: IntMatrix,
        degree: i64,
    ) -> LatticeResult<Self> {
        let p = Presentation { name: name.into(), source, target, psi, psi_right, degree };
        if p.target.index() != p.source.index() - degree || degree < 1 || degree > p.source.index() {
            return Err(LatticeError::InvariantViolated("block lengths do not match the degree".into()));
        }
        // psi_right must be right adjoint to psi: chi_D(psi a, b) = chi_C(a, psi_right b)
        let lhs = p.psi.transpose().mul(p.target.gram());
        let rhs = p.source.gram().mul(&p.psi_right);
        if lhs != rhs {
            return Err(LatticeError::InvariantViolated("pushforward is not right adjoint to restriction".into()));
        }
        Ok(p)
    }

    /// `m = ind(M)`.
    pub fn m(&self) -> i64 {
        self.source.index()
    }

    pub fn d(&self) -> i64 {
        self.degree
    }

    /// `gcd(d, m)`.
    pub fn c(&self) -> i64 {
        self.degree.gcd(&self.m())
    }

    pub fn psi_op(&self) -> LatticeOperator {
        LatticeOperator::new("Psi", self.psi.clone(), 0)
    }

    pub fn psi_right_op(&self) -> LatticeOperator {
        LatticeOperator::new("PsiR", self.psi_right.clone(), 0)
    }

    /// Left adjoint `F -> i_*(F)(d)[-1]`.
    pub fn psi_left_op(&self) -> LatticeOperator {
        LatticeOperator::new("PsiL", self.source.alpha_pow(self.degree).mul(&self.psi_right), -1)
    }

    /// `T_{Psi!,Psi}`: cone of the unit, `1 - psi_right psi`.
    pub fn twist_source(&self) -> LatticeOperator {
        let n = self.source.rank();
        LatticeOperator::new("T_C", IntMatrix::identity(n).sub(&self.psi_right.mul(&self.psi)), 0)
    }

    /// `T_{Psi*,Psi}`: `1 - psi_left psi`.
    pub fn twist_source_inv(&self) -> LatticeOperator {
        let n = self.source.rank();
        let pl = self.psi_left_op().effective();
        LatticeOperator::new("T_Cinv", IntMatrix::identity(n).sub(&pl.mul(&self.psi)), 0)
    }

    /// `T_{Psi,Psi!}`: `1 - psi psi_right`.
    pub fn twist_target(&self) -> LatticeOperator {
        let n = self.target.rank();
        LatticeOperator::new("T_D", IntMatrix::identity(n).sub(&self.psi.mul(&self.psi_right)), 0)
    }

    /// `T_{Psi,Psi*}`: `1 - psi psi_left`.
    pub fn twist_target_inv(&self) -> LatticeOperator {
        let n = self.target.rank();
        let pl = self.psi_left_op().effective();
        LatticeOperator::new("T_Dinv", IntMatrix::identity(n).sub(&self.psi.mul(&pl)), 0)
    }

    /// Twist of `D` along the image of the source block `<O_M>`.
    pub fn block_twist_target(&self) -> LatticeResult<LatticeOperator> {
        let o_m = self.source.structure_class()?;
        let o_x = self.psi.mul_vec(&o_m);
        let n = self.target.rank();
        let cols: Vec<Vec<Int>> = (0..n)
            .map(|j| {
                let v = unit_vector(n, j);
                let coeff = self.source.chi(&o_m, &self.psi_right.mul_vec(&v));
                crate::lattice::axpy(&v, &-coeff, &o_x)
            })
            .collect();
        Ok(LatticeOperator::new("T_DB", IntMatrix::from_columns(&cols, n), 0))
    }

    /// Right adjoint of the inclusion of the source residual, as a map on `C`:
    /// right projection along `<O(-m), ..., O(-1)>`.
    pub fn source_residual_right_adjoint(&self) -> LatticeResult<IntMatrix> {
        let block = (-self.m()..0).map(|i| self.source.twisting_class(i)).collect::<LatticeResult<Vec<_>>>()?;
        self.source.block_projection(&block, Side::Right)
    }

    /// `T_{Psi_R,Psi_R!}` as an operator on all of `D`.
    pub fn residual_twist_on_target(&self) -> LatticeResult<LatticeOperator> {
        let xi = self.source_residual_right_adjoint()?;
        let n = self.target.rank();
        let m = IntMatrix::identity(n).sub(&self.psi.mul(&xi).mul(&self.psi_right));
        Ok(LatticeOperator::new("T_DR", m, 0))
    }

    /// Rotation of `C`: `L_[O_M] o alpha`.
    pub fn rotation_source(&self) -> LatticeResult<LatticeOperator> {
        self.source.rotation_operator()
    }

    /// Rotation of `D`; when `d = m` the block twist replaces the mutation.
    pub fn rotation_target(&self) -> LatticeResult<LatticeOperator> {
        if self.target.index() > 0 {
            return self.target.rotation_operator();
        }
        let t = self.block_twist_target()?;
        Ok(t.compose(&self.target.alpha_operator()).with_name("O_B"))
    }

    pub fn left_projection_source(&self) -> LatticeResult<LatticeOperator> {
        let block = [self.source.structure_class()?];
        Ok(LatticeOperator::new("L_B", self.source.block_projection(&block, Side::Left)?, 0))
    }

    pub fn right_projection_source(&self) -> LatticeResult<LatticeOperator> {
        let block = [self.source.structure_class()?];
        Ok(LatticeOperator::new("R_B", self.source.block_projection(&block, Side::Right)?, 0))
    }

    pub fn left_projection_target(&self) -> LatticeResult<LatticeOperator> {
        let block = [self.target.structure_class()?];
        Ok(LatticeOperator::new("L_B", self.target.block_projection(&block, Side::Left)?, 0))
    }

    pub fn right_projection_target(&self) -> LatticeResult<LatticeOperator> {
        let block = [self.target.structure_class()?];
        Ok(LatticeOperator::new("R_B", self.target.block_projection(&block, Side::Right)?, 0))
    }

    /// `alpha^-1 o R_B` on `C`, inverse to the rotation on the residual.
    pub fn inverse_rotation_source(&self) -> LatticeResult<LatticeOperator> {
        let r = self.right_projection_source()?;
        Ok(LatticeOperator::new("O_Bprime", self.source.alpha_inv().clone(), 0).compose(&r).with_name("O_Bprime"))
    }

    /// `alpha^-1 o R_B` on `D`, or the inverse of the block-twist rotation when `d = m`.
    pub fn inverse_rotation_target(&self) -> LatticeResult<LatticeOperator> {
        if self.target.index() > 0 {
            let r = self.right_projection_target()?;
            return Ok(LatticeOperator::new("O_Bprime", self.target.alpha_inv().clone(), 0)
                .compose(&r)
                .with_name("O_Bprime"));
        }
        Ok(self.rotation_target()?.inverse()?.with_name("O_Bprime"))
    }

    pub fn residual_suite(&self) -> LatticeResult<ResidualSuite> {
        let m = self.m();
        let d = self.d();
        let res_c = self.source.residual()?;
        let res_d = self.target.residual()?;

        let t_c = self.twist_source();
        let t_d = self.twist_target();

        let xi = self.source_residual_right_adjoint()?;
        let psi_r = res_d
            .sub
            .restrict_between(&self.psi, &res_c.sub)
            .ok_or_else(|| LatticeError::NotInvariant("Psi_R".into()))?;
        let psi_r_right = res_c
            .sub
            .restrict_between(&xi.mul(&self.psi_right), &res_d.sub)
            .ok_or_else(|| LatticeError::NotInvariant("Psi_R right adjoint".into()))?;

        // source side
        let twist_mut_c = res_c.restrict(&LatticeOperator::new("T_RC", xi.mul(&t_c.matrix), 0))?;
        let source = side_operators(&self.source, res_c, self.rotation_source()?, &t_c, m, d, twist_mut_c)?;

        // target side: T_{Psi_R,Psi_R!} = 1 - Psi_R Psi_R^!
        let r = psi_r.rows();
        let twist_mut_d = LatticeOperator::new("T_RD", IntMatrix::identity(r).sub(&psi_r.mul(&psi_r_right)), 0);
        let target = side_operators(&self.target, res_d, self.rotation_target()?, &t_d, m - d, d, twist_mut_d)?;

        Ok(ResidualSuite { source, target, psi_r, psi_r_right })
    }

    /// Serre power identities on both residuals, plus consistency checks.
    pub fn verify(&self) -> VerificationReport {
        let mut rep = VerificationReport::new(self.name.clone());
        let Some(suite) = rep.check_result("residual operators", self.residual_suite()) else {
            return rep;
        };
        let (m, d, c) = (self.m(), self.d(), self.c());
        let target_dim = self.target.dim();
        let target_ind = self.target.index();

        for (label, side) in [("source", &suite.source), ("target", &suite.target)] {
            rep.check_equal(
                format!("{label}: Serre by mutation = Serre by rotation"),
                &side.serre_mutation,
                &side.serre_rotation,
            );
            rep.check_equal(
                format!("{label}: twist by adjunction = rotation^-d o t"),
                &side.twist_mutation,
                &side.twist_rotation,
            );
            let ops = [&side.serre_mutation, &side.rotation, &side.s, &side.t, &side.twist_mutation];
            let unimodular = ops.iter().all(|o| o.is_unimodular());
            rep.check(format!("{label}: operators are unimodular"), unimodular, "determinants are +-1");
            let factors = [&side.twist_mutation, &side.t, &side.s, &side.rotation];
            let commute = factors.iter().all(|a| factors.iter().all(|b| a.commutes_with(b)));
            rep.check(format!("{label}: factors commute"), commute, "twist, t, s and rotation");
        }

        let power = |op: &LatticeOperator, e: i64| op.pow(e);
        let src = &suite.source;
        let tgt = &suite.target;
        let general = (|| -> LatticeResult<_> {
            let lhs_t = power(&tgt.serre_mutation, d / c)?;
            let rhs_t = power(&tgt.twist_mutation, (m - d) / c)?
                .compose(&power(&tgt.t, (d - m) / c)?)
                .compose(&power(&tgt.s, d / c)?);
            let lhs_s = power(&src.serre_mutation, d / c)?;
            let rhs_s =
                power(&src.twist_mutation, m / c)?.compose(&power(&src.t, -m / c)?).compose(&power(&src.s, d / c)?);
            let cor_t = power(&tgt.twist_mutation, target_ind / c)?.shifted((d * target_dim - 2 * target_ind) / c);
            let cor_s = power(&src.twist_mutation, m / c)?.shifted(d * self.source.dim() / c);
            Ok((lhs_t, rhs_t, lhs_s, rhs_s, cor_t, cor_s))
        })();
        if let Some((lhs_t, rhs_t, lhs_s, rhs_s, cor_t, cor_s)) = rep.check_result("operator powers", general) {
            rep.check_equal("target: S^(d/c) = T^((m-d)/c) t^((d-m)/c) s^(d/c)", &lhs_t, &rhs_t);
            rep.check_equal("source: S^(d/c) = T^(m/c) t^(-m/c) s^(d/c)", &lhs_s, &rhs_s);
            rep.check_equal("target: S^(d/c) = T^(ind/c) [(d dim - 2 ind)/c]", &lhs_t, &cor_t);
            rep.check_equal("source: S^(d/c) = T^(m/c) [d dim/c]", &lhs_s, &cor_s);
        }

        let lhs = suite.psi_r.mul(&src.twist_mutation.matrix);
        let rhs = tgt.twist_mutation.matrix.mul(&suite.psi_r);
        rep.check("restriction intertwines the residual twists", lhs == rhs, "Psi_R T_src = T_tgt Psi_R");
        rep
    }
}

fn side_operators(
    lattice: &NumLattice,
    residual: Residual,
    rotation_full: LatticeOperator,
    twist_full: &LatticeOperator,
    block_len: i64,
    d: i64,
    twist_mutation: LatticeOperator,
) -> LatticeResult<SideOperators> {
    let rotation = residual.restrict(&rotation_full)?;
    let serre = lattice.serre_operator();

    let s_full = serre.compose(&LatticeOperator::new("alpha", lattice.alpha_pow(block_len), 0));
    let s = residual.restrict(&s_full)?.with_name("s_R");
    let t_full = twist_full.compose(&LatticeOperator::new("alpha", lattice.alpha_pow(d), 0));
    let t = residual.restrict(&t_full)?.with_name("t_R");

    // S_R^-1 = L_<B, ..., alpha^(len-1) B> o S^-1 restricted
    let block = lattice.rectangular_block()?;
    let proj = lattice.block_projection(&block, Side::Left)?;
    let serre_inv = serre.inverse()?;
    let inv = residual.restrict(&LatticeOperator {
        name: "S_R^-1".into(),
        matrix: proj.mul(&serre_inv.matrix),
        sign: serre_inv.sign,
    })?;
    let serre_mutation = inv.inverse()?.with_name("S_R");

    let serre_rotation = s.compose(&rotation.pow(-block_len)?).with_name("S_R");
    let twist_rotation = rotation.pow(-d)?.compose(&t).with_name("T_R");
    Ok(SideOperators {
        residual,
        serre_mutation,
        serre_rotation,
        rotation: rotation.with_name("O_B"),
        s,
        t,
        twist_rotation,
        twist_mutation: twist_mutation.with_name("T_R"),
    })
}
