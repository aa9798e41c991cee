//! Linear echo state networks: diagonal (non-interconnected) and dense
//! sparse reservoirs, pseudo-inverse readout training, and the
//! diagonalization argument that reduces a dense reservoir to a diagonal
//! one.
//!
//! The state update is `x[n] = W_res x[n-1] + W_in u[n]` with identity
//! activation, started from `x[-1] = 0`; the readout is `y[n] = W_out x[n]`.
//! For a diagonal `W_res` each neuron is a first-order IIR system, which is
//! what ties the network to the projection analysis.

use nalgebra::{DMatrix, DVector, SVD};
use rand::Rng;

use crate::error::{Error, Result};
use crate::lti::{Pole, Signal};
use crate::projection::PoleSet;

/// Eigenbasis condition numbers above this make the diagonalization check
/// numerically meaningless, so it refuses to run.
pub const EIGENBASIS_CONDITION_LIMIT: f64 = 1e8;

/// A reservoir whose recurrent matrix is diagonal: `M` decoupled neurons,
/// one pole each.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalReservoir {
    poles: PoleSet,
}

impl DiagonalReservoir {
    pub fn new(poles: PoleSet) -> Self {
        DiagonalReservoir { poles }
    }

    pub fn poles(&self) -> &PoleSet {
        &self.poles
    }

    pub fn size(&self) -> usize {
        self.poles.len()
    }
}

/// A dense (possibly sparse-masked) recurrent matrix with known spectral
/// radius.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseReservoir {
    matrix: DMatrix<f64>,
    kappa: f64,
    spectral_radius: f64,
}

/// Largest eigenvalue magnitude of a square matrix.
pub fn spectral_radius(w: &DMatrix<f64>) -> f64 {
    w.clone()
        .complex_eigenvalues()
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max)
}

impl DenseReservoir {
    /// Draws an `m x m` matrix with entries `U(-1, 1)`, zeroes each entry
    /// independently with probability `kappa`, and rescales so the spectral
    /// radius equals `target_radius`. An all-zero draw (possible for large
    /// `kappa`) is simply redrawn.
    pub fn random<R: Rng + ?Sized>(
        m: usize,
        kappa: f64,
        target_radius: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfig("reservoir size must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&kappa) {
            return Err(Error::InvalidConfig(format!(
                "sparsity must lie in [0, 1), got {kappa}"
            )));
        }
        if !(target_radius > 0.0 && target_radius < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "spectral radius must lie in (0, 1), got {target_radius}"
            )));
        }
        loop {
            let mut w = DMatrix::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    if rng.gen::<f64>() >= kappa {
                        w[(i, j)] = rng.gen_range(-1.0..1.0);
                    }
                }
            }
            let rho = spectral_radius(&w);
            if rho < 1e-12 {
                continue;
            }
            w *= target_radius / rho;
            return Ok(DenseReservoir {
                matrix: w,
                kappa,
                spectral_radius: target_radius,
            });
        }
    }

    /// Wraps an explicit stable matrix without rescaling it.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidConfig(
                "reservoir matrix must be square and non-empty".into(),
            ));
        }
        let rho = spectral_radius(&matrix);
        if rho >= 1.0 {
            return Err(Error::UnstableSystem(rho));
        }
        let zeros = matrix.iter().filter(|&&v| v == 0.0).count();
        let kappa = zeros as f64 / (matrix.nrows() * matrix.ncols()) as f64;
        Ok(DenseReservoir {
            matrix,
            kappa,
            spectral_radius: rho,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// The sparsity parameter used for construction (or the measured
    /// zero-entry fraction for wrapped matrices).
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Either reservoir topology.
#[derive(Debug, Clone, PartialEq)]
pub enum Reservoir {
    Diagonal(DiagonalReservoir),
    Dense(DenseReservoir),
}

impl Reservoir {
    pub fn size(&self) -> usize {
        match self {
            Reservoir::Diagonal(d) => d.size(),
            Reservoir::Dense(d) => d.size(),
        }
    }

    /// The recurrent matrix in dense form (diagonal reservoirs embed).
    pub fn to_matrix(&self) -> DMatrix<f64> {
        match self {
            Reservoir::Diagonal(d) => DMatrix::from_diagonal(&DVector::from_iterator(
                d.size(),
                d.poles().poles().iter().map(|p| p.value()),
            )),
            Reservoir::Dense(d) => d.matrix.clone(),
        }
    }
}

/// Readout training configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Relative singular-value cutoff for the pseudo-inverse.
    pub rank_tolerance: f64,
    /// Initial states per sequence discarded before fitting. Both the
    /// target system and the reservoir start at rest, so no transient
    /// mismatch exists and the default is 0.
    pub washout: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            rank_tolerance: 1e-12,
            washout: 0,
        }
    }
}

/// A linear ESN: fixed reservoir and input weights, trainable readout.
#[derive(Debug, Clone, PartialEq)]
pub struct EsnModel {
    reservoir: Reservoir,
    w_in: DVector<f64>,
    w_out: Option<DVector<f64>>,
}

impl EsnModel {
    /// Diagonal reservoir with unit input weights.
    pub fn diagonal(poles: PoleSet) -> Self {
        let m = poles.len();
        EsnModel {
            reservoir: Reservoir::Diagonal(DiagonalReservoir::new(poles)),
            w_in: DVector::from_element(m, 1.0),
            w_out: None,
        }
    }

    /// Diagonal reservoir with explicit input weights.
    pub fn diagonal_with_input(poles: PoleSet, w_in: DVector<f64>) -> Result<Self> {
        if w_in.len() != poles.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} input weights for {} poles",
                w_in.len(),
                poles.len()
            )));
        }
        Ok(EsnModel {
            reservoir: Reservoir::Diagonal(DiagonalReservoir::new(poles)),
            w_in,
            w_out: None,
        })
    }

    /// Dense reservoir; input weights drawn `U(-1, 1)`.
    pub fn dense<R: Rng + ?Sized>(reservoir: DenseReservoir, rng: &mut R) -> Self {
        let m = reservoir.size();
        EsnModel {
            reservoir: Reservoir::Dense(reservoir),
            w_in: DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0)),
            w_out: None,
        }
    }

    pub fn reservoir(&self) -> &Reservoir {
        &self.reservoir
    }

    pub fn size(&self) -> usize {
        self.reservoir.size()
    }

    pub fn input_weights(&self) -> &DVector<f64> {
        &self.w_in
    }

    pub fn output_weights(&self) -> Option<&DVector<f64>> {
        self.w_out.as_ref()
    }

    /// Installs readout weights directly (used when the optimal weights are
    /// known in closed form rather than regressed).
    pub fn set_output_weights(&mut self, weights: &[f64]) -> Result<()> {
        if weights.len() != self.size() {
            return Err(Error::DimensionMismatch(format!(
                "{} output weights for reservoir of size {}",
                weights.len(),
                self.size()
            )));
        }
        self.w_out = Some(DVector::from_column_slice(weights));
        Ok(())
    }

    /// Runs the state recursion over an input; column `n` holds the state
    /// after consuming `input[n]`.
    pub fn run_states(&self, input: &Signal) -> DMatrix<f64> {
        let m = self.size();
        let l = input.len();
        let mut states = DMatrix::zeros(m, l);
        match &self.reservoir {
            Reservoir::Diagonal(d) => {
                let poles = d.poles().poles();
                let mut x = vec![0.0; m];
                for (n, &u) in input.samples().iter().enumerate() {
                    for (i, p) in poles.iter().enumerate() {
                        x[i] = p.value() * x[i] + self.w_in[i] * u;
                        states[(i, n)] = x[i];
                    }
                }
            }
            Reservoir::Dense(d) => {
                let w = &d.matrix;
                let mut x = DVector::zeros(m);
                let mut next = DVector::zeros(m);
                for (n, &u) in input.samples().iter().enumerate() {
                    next.gemv(1.0, w, &x, 0.0);
                    next.axpy(u, &self.w_in, 1.0);
                    std::mem::swap(&mut x, &mut next);
                    states.set_column(n, &x);
                }
            }
        }
        states
    }

    /// Stacks post-washout states of all sequences into a design matrix
    /// (rows = time samples) and the matching target vector.
    fn design_matrix(
        &self,
        inputs: &[Signal],
        targets: &[Signal],
        washout: usize,
    ) -> Result<(DMatrix<f64>, DVector<f64>)> {
        if inputs.is_empty() || inputs.len() != targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} input sequences vs {} target sequences",
                inputs.len(),
                targets.len()
            )));
        }
        let m = self.size();
        let mut rows = 0usize;
        for (x, y) in inputs.iter().zip(targets) {
            if x.len() != y.len() {
                return Err(Error::DimensionMismatch(format!(
                    "input length {} vs target length {}",
                    x.len(),
                    y.len()
                )));
            }
            if x.len() <= washout {
                return Err(Error::InvalidConfig(format!(
                    "sequence length {} does not survive washout {washout}",
                    x.len()
                )));
            }
            rows += x.len() - washout;
        }
        let mut design = DMatrix::zeros(rows, m);
        let mut rhs = DVector::zeros(rows);
        let mut row = 0usize;
        for (x, y) in inputs.iter().zip(targets) {
            let states = self.run_states(x);
            for n in washout..x.len() {
                for i in 0..m {
                    design[(row, i)] = states[(i, n)];
                }
                rhs[row] = y.samples()[n];
                row += 1;
            }
        }
        Ok((design, rhs))
    }

    /// Fits the readout by rank-tolerant pseudo-inverse over one or more
    /// input/target sequence pairs and returns the per-sample training
    /// loss.
    pub fn train(
        &mut self,
        inputs: &[Signal],
        targets: &[Signal],
        cfg: &TrainConfig,
    ) -> Result<f64> {
        if cfg.rank_tolerance <= 0.0 || cfg.rank_tolerance.is_nan() {
            return Err(Error::InvalidConfig(format!(
                "rank tolerance must be positive, got {}",
                cfg.rank_tolerance
            )));
        }
        let (design, rhs) = self.design_matrix(inputs, targets, cfg.washout)?;
        if design.norm_squared() == 0.0 {
            return Err(Error::DegenerateInput);
        }
        let rows = design.nrows();
        let svd = SVD::new(design.clone(), true, true);
        let cutoff = cfg.rank_tolerance * svd.singular_values.max();
        let w = svd
            .solve(&rhs, cutoff)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let residual = design * &w - rhs;
        self.w_out = Some(w);
        Ok(residual.norm_squared() / rows as f64)
    }

    /// Per-sample squared readout error over held-out sequences.
    pub fn evaluate_loss(
        &self,
        inputs: &[Signal],
        targets: &[Signal],
        cfg: &TrainConfig,
    ) -> Result<f64> {
        let w = self.w_out.as_ref().ok_or(Error::NotTrained)?;
        let (design, rhs) = self.design_matrix(inputs, targets, cfg.washout)?;
        let residual = design * w - rhs;
        Ok(residual.norm_squared() / residual.len() as f64)
    }

    /// Readout output `y[n] = W_out . x[n]`.
    pub fn predict(&self, input: &Signal) -> Result<Signal> {
        let w = self.w_out.as_ref().ok_or(Error::NotTrained)?;
        let states = self.run_states(input);
        let y = states.transpose() * w;
        Signal::new(y.iter().copied().collect())
    }
}

/// Outcome of the diagonalization equivalence check.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalizationReport {
    /// Least-squares training loss fitted from the original states.
    pub dense_loss: f64,
    /// The same fit from the states of the diagonalized system.
    pub diagonalized_loss: f64,
    /// Condition number of the eigenbasis used for the transformation.
    pub eigenbasis_condition: f64,
}

/// Verifies that diagonalizing the reservoir preserves what the readout can
/// express: the transformed system `(Lambda, Q^-1 W_in)` must fit a target
/// exactly as well as the original, because the states differ only by the
/// fixed invertible map `Q`.
///
/// Works for symmetric matrices and for matrices with a real, distinct,
/// well-conditioned eigensystem; anything else is refused with a
/// diagnostic error.
pub fn diagonalize_check(
    model: &EsnModel,
    input: &Signal,
    target: &Signal,
    cfg: &TrainConfig,
) -> Result<DiagonalizationReport> {
    if input.len() != target.len() {
        return Err(Error::DimensionMismatch(format!(
            "input length {} vs target length {}",
            input.len(),
            target.len()
        )));
    }
    let m = model.size();
    let w = model.reservoir().to_matrix();
    let scale = w.norm().max(1.0);

    let symmetric = (&w - w.transpose()).norm() <= 1e-12 * scale;
    let (lambda, q) = if symmetric {
        let eig = w.clone().symmetric_eigen();
        (eig.eigenvalues, eig.eigenvectors)
    } else {
        let eigs = w.clone().complex_eigenvalues();
        if eigs.iter().any(|e| e.im.abs() > 1e-8 * scale) {
            return Err(Error::ComplexSpectrum);
        }
        let re: Vec<f64> = eigs.iter().map(|e| e.re).collect();
        for i in 0..m {
            for j in (i + 1)..m {
                if (re[i] - re[j]).abs() <= 1e-8 * scale {
                    return Err(Error::ComplexSpectrum);
                }
            }
        }
        // Eigenvector for each eigenvalue: the right singular vector of
        // (W - lambda I) belonging to its smallest singular value.
        let mut q = DMatrix::zeros(m, m);
        for (k, &l) in re.iter().enumerate() {
            let shifted = &w - DMatrix::identity(m, m) * l;
            let svd = SVD::new(shifted, false, true);
            let v_t = svd.v_t.expect("requested right singular vectors");
            q.set_column(k, &v_t.row(m - 1).transpose());
        }
        (DVector::from_vec(re), q)
    };

    let sv = q.clone().svd(false, false).singular_values;
    let cond = sv.max() / sv.min();
    if !cond.is_finite() || cond > EIGENBASIS_CONDITION_LIMIT {
        return Err(Error::IllConditionedEigenbasis(cond));
    }

    let w_in_t = q
        .clone()
        .lu()
        .solve(model.input_weights())
        .ok_or(Error::IllConditionedEigenbasis(f64::INFINITY))?;
    let poles: Result<Vec<Pole>> = lambda.iter().map(|&l| Pole::new(l)).collect();
    let transformed = EsnModel::diagonal_with_input(PoleSet::new(poles?)?, w_in_t)?;

    let dense_loss = model.clone().train(
        std::slice::from_ref(input),
        std::slice::from_ref(target),
        cfg,
    )?;
    let diagonalized_loss = transformed.clone().train(
        std::slice::from_ref(input),
        std::slice::from_ref(target),
        cfg,
    )?;
    Ok(DiagonalizationReport {
        dense_loss,
        diagonalized_loss,
        eigenbasis_condition: cond,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::{impulse_response, RationalIir};
    use crate::projection::{build_gram, project};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pole(v: f64) -> Pole {
        Pole::new(v).unwrap()
    }

    fn pole_set(vals: &[f64]) -> PoleSet {
        PoleSet::new(vals.iter().map(|&v| pole(v)).collect()).unwrap()
    }

    #[test]
    fn impulse_states_are_per_neuron_impulse_responses() {
        let model = EsnModel::diagonal(pole_set(&[0.5, -0.73, 0.9, 0.0]));
        let states = model.run_states(&Signal::unit_impulse(40));
        for n in 0..40 {
            for (i, &p) in [0.5, -0.73, 0.9, 0.0].iter().enumerate() {
                assert_eq!(states[(i, n)], impulse_response(pole(p), n));
            }
        }
    }

    #[test]
    fn zero_input_gives_zero_states() {
        let model = EsnModel::diagonal(pole_set(&[0.5, -0.5]));
        assert_eq!(model.run_states(&Signal::zeros(10)).norm_squared(), 0.0);
    }

    #[test]
    fn dense_states_match_hand_recursion() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let res = DenseReservoir::random(3, 0.0, 0.9, &mut rng).unwrap();
        let w = res.matrix().clone();
        let model = EsnModel::dense(res, &mut rng);
        let input = Signal::white_noise(5, &mut rng);
        let states = model.run_states(&input);

        let mut x = DVector::<f64>::zeros(3);
        for (n, &u) in input.samples().iter().enumerate() {
            x = &w * &x + model.input_weights() * u;
            for i in 0..3 {
                assert!((states[(i, n)] - x[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn train_recovers_known_readout() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let mut model = EsnModel::diagonal(pole_set(&[0.1, -0.4, 0.7, 0.85]));
        model.set_output_weights(&[0.3, -1.2, 2.0, 0.05]).unwrap();
        let input = Signal::white_noise(200, &mut rng);
        let target = model.predict(&input).unwrap();

        let mut fresh = EsnModel::diagonal(pole_set(&[0.1, -0.4, 0.7, 0.85]));
        let loss = fresh
            .train(&[input], &[target], &TrainConfig::default())
            .unwrap();
        assert!(loss < 1e-16, "training loss {loss}");
        let w = fresh.output_weights().unwrap();
        for (got, want) in w.iter().zip(&[0.3, -1.2, 2.0, 0.05]) {
            assert!((got - want).abs() < 1e-8);
        }
    }

    #[test]
    fn train_nails_target_pole_inside_pole_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let input = Signal::white_noise(300, &mut rng);
        let target = RationalIir::first_order(pole(0.7)).filter(&input);
        let mut model = EsnModel::diagonal(pole_set(&[0.2, 0.7, -0.5]));
        let loss = model
            .train(&[input], &[target], &TrainConfig::default())
            .unwrap();
        assert!(loss < 1e-12, "training loss {loss}");
    }

    #[test]
    fn long_horizon_training_approaches_projection_weights() {
        // Impulse input, target pole 0 on poles {-1/2, 1/2}: regression over
        // 10^4 samples is a truncated version of the closed-form projection,
        // whose weights are (15/32, 15/32) for the unit-norm target (the
        // normalization factor is 1 at alpha = 0).
        let input = Signal::unit_impulse(10_000);
        let target = RationalIir::first_order(pole(0.0)).filter(&input);
        let mut model = EsnModel::diagonal(pole_set(&[-0.5, 0.5]));
        model
            .train(&[input], &[target], &TrainConfig::default())
            .unwrap();
        let closed = project(&build_gram(&pole_set(&[-0.5, 0.5]), pole(0.0)));
        for (got, want) in model.output_weights().unwrap().iter().zip(closed.weights()) {
            assert!((got - want).abs() < 1e-4, "{got} vs {want}");
        }
    }

    #[test]
    fn train_rejects_degenerate_and_mismatched_inputs() {
        let mut model = EsnModel::diagonal(pole_set(&[0.5]));
        let err = model
            .train(
                &[Signal::zeros(20)],
                &[Signal::zeros(20)],
                &TrainConfig::default(),
            )
            .unwrap_err();
        assert_eq!(err, Error::DegenerateInput);

        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let x = Signal::white_noise(10, &mut rng);
        let y = Signal::white_noise(9, &mut rng);
        assert!(matches!(
            model.train(&[x], &[y], &TrainConfig::default()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn predict_requires_training() {
        let model = EsnModel::diagonal(pole_set(&[0.5]));
        assert_eq!(
            model.predict(&Signal::unit_impulse(4)).unwrap_err(),
            Error::NotTrained
        );
    }

    #[test]
    fn washout_drops_leading_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let input = Signal::white_noise(100, &mut rng);
        let target = RationalIir::first_order(pole(0.6)).filter(&input);
        let mut model = EsnModel::diagonal(pole_set(&[0.6, -0.3]));
        let cfg = TrainConfig {
            washout: 10,
            ..TrainConfig::default()
        };
        let loss = model
            .train(
                std::slice::from_ref(&input),
                std::slice::from_ref(&target),
                &cfg,
            )
            .unwrap();
        assert!(loss < 1e-12);
        // washout >= length is rejected
        let bad = TrainConfig {
            washout: 100,
            ..TrainConfig::default()
        };
        assert!(matches!(
            model.train(&[input], &[target], &bad),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn random_dense_reservoir_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        // scalar case: the only entry scales to +/- the radius
        let r = DenseReservoir::random(1, 0.0, 0.9, &mut rng).unwrap();
        assert!((r.matrix()[(0, 0)].abs() - 0.9).abs() < 1e-12);

        // zero-entry count consistent with the sparsity parameter
        let r = DenseReservoir::random(50, 0.5, 0.95, &mut rng).unwrap();
        let zeros = r.matrix().iter().filter(|&&v| v == 0.0).count() as f64;
        assert!((zeros - 1250.0).abs() <= 106.0, "zero count {zeros}");

        // spectral radius hits the target after scaling
        assert!((spectral_radius(r.matrix()) - 0.95).abs() < 1e-8);

        // parameter validation
        assert!(DenseReservoir::random(0, 0.0, 0.9, &mut rng).is_err());
        assert!(DenseReservoir::random(3, 1.0, 0.9, &mut rng).is_err());
        assert!(DenseReservoir::random(3, 0.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn from_matrix_rejects_unstable() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 1.1]));
        assert!(matches!(
            DenseReservoir::from_matrix(m),
            Err(Error::UnstableSystem(_))
        ));
    }

    #[test]
    fn diagonalize_check_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let raw = DMatrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
        let sym = (&raw + raw.transpose()) * 0.5;
        let sym = &sym * (0.9 / spectral_radius(&sym));
        let res = DenseReservoir::from_matrix(sym).unwrap();
        let model = EsnModel::dense(res, &mut rng);
        let input = Signal::white_noise(300, &mut rng);
        let target = RationalIir::first_order(pole(0.4)).filter(&input);
        let report = diagonalize_check(&model, &input, &target, &TrainConfig::default()).unwrap();
        assert!(
            (report.dense_loss - report.diagonalized_loss).abs() < 1e-8,
            "{report:?}"
        );
        // orthogonal eigenbasis
        assert!(report.eigenbasis_condition < 1.0 + 1e-8);
    }

    #[test]
    fn diagonalize_check_diagonal_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        let model = EsnModel::diagonal(pole_set(&[0.8, -0.6, 0.3]));
        let input = Signal::white_noise(200, &mut rng);
        let target = RationalIir::first_order(pole(0.5)).filter(&input);
        let report = diagonalize_check(&model, &input, &target, &TrainConfig::default()).unwrap();
        assert!((report.dense_loss - report.diagonalized_loss).abs() < 1e-14);
    }

    #[test]
    fn diagonalize_check_constructed_eigensystem() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        // W = Q Lambda Q^-1 with distinct real eigenvalues and a mild,
        // well-conditioned similarity.
        let lambda = DVector::from_vec(vec![0.85, 0.5, 0.1, -0.35, -0.75]);
        let q = DMatrix::identity(5, 5) + DMatrix::from_fn(5, 5, |_, _| rng.gen_range(-0.2..0.2));
        let w = &q * DMatrix::from_diagonal(&lambda) * q.clone().try_inverse().unwrap();
        let res = DenseReservoir::from_matrix(w).unwrap();
        let model = EsnModel::dense(res, &mut rng);
        let input = Signal::white_noise(300, &mut rng);
        let target = RationalIir::first_order(pole(0.3)).filter(&input);
        let report = diagonalize_check(&model, &input, &target, &TrainConfig::default()).unwrap();
        assert!(
            (report.dense_loss - report.diagonalized_loss).abs() < 1e-7 * (1.0 + report.dense_loss),
            "{report:?}"
        );
    }

    #[test]
    fn diagonalize_check_refuses_complex_spectrum() {
        // rotation-like matrix scaled inside the unit disk
        let w = DMatrix::from_row_slice(2, 2, &[0.0, -0.9, 0.9, 0.0]);
        let res = DenseReservoir::from_matrix(w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let model = EsnModel::dense(res, &mut rng);
        let input = Signal::white_noise(50, &mut rng);
        let target = Signal::white_noise(50, &mut rng);
        assert_eq!(
            diagonalize_check(&model, &input, &target, &TrainConfig::default()).unwrap_err(),
            Error::ComplexSpectrum
        );
    }

    proptest! {
        // Trained weights are a local minimum of the training loss.
        #[test]
        fn trained_readout_is_locally_optimal(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.9..0.9)).collect();
            let input = Signal::white_noise(80, &mut rng);
            let target = Signal::white_noise(80, &mut rng);
            let mut model = EsnModel::diagonal(pole_set(&vals));
            let cfg = TrainConfig::default();
            let base = model
                .train(
                    std::slice::from_ref(&input),
                    std::slice::from_ref(&target),
                    &cfg,
                )
                .unwrap();

            let m = model.size();
            let mut dir = DVector::from_fn(m, |_, _| rng.gen_range(-1.0f64..1.0));
            dir /= dir.norm();
            let mut perturbed = model.clone();
            let w: Vec<f64> = model
                .output_weights()
                .unwrap()
                .iter()
                .zip(dir.iter())
                .map(|(w, d)| w + 1e-3 * d)
                .collect();
            perturbed.set_output_weights(&w).unwrap();
            let moved = perturbed.evaluate_loss(&[input], &[target], &cfg).unwrap();
            prop_assert!(moved >= base - 1e-12 * (1.0 + base));
        }

        // Appending a neuron enlarges the regression span, so training loss
        // cannot go up.
        #[test]
        fn training_loss_non_increasing_in_size(seed in 0u64..200, m in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut vals: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.9..0.9)).collect();
            let input = Signal::white_noise(60, &mut rng);
            let target = Signal::white_noise(60, &mut rng);
            let cfg = TrainConfig::default();
            let before = EsnModel::diagonal(pole_set(&vals))
                .train(std::slice::from_ref(&input), std::slice::from_ref(&target), &cfg)
                .unwrap();
            vals.push(rng.gen_range(-0.9..0.9));
            let after = EsnModel::diagonal(pole_set(&vals))
                .train(&[input], &[target], &cfg)
                .unwrap();
            prop_assert!(after <= before + 1e-9 * (1.0 + before), "{before} -> {after}");
        }

        // The whole pipeline is linear in the input signal.
        #[test]
        fn prediction_is_linear(seed in 0u64..200, a in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.9..0.9)).collect();
            let mut model = EsnModel::diagonal(pole_set(&vals));
            model.set_output_weights(&[0.7, -0.2, 1.1][..vals.len()]).unwrap();
            let x = Signal::white_noise(50, &mut rng);
            let scaled = x.axpby(a, &Signal::zeros(50), 0.0).unwrap();
            let y_scaled = model.predict(&scaled).unwrap();
            let y = model.predict(&x).unwrap();
            for (l, r) in y_scaled.samples().iter().zip(y.samples()) {
                prop_assert!((l - a * r).abs() < 1e-10);
            }
        }
    }
}
