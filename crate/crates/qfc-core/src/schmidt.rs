//! Schmidt decomposition of the joint spectral distribution: quadrature-scaled
//! SVD giving the mode pairs, their coefficients and the Schmidt number.

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::fields::PhotonState;
use crate::grid::FrequencyAxis;
use crate::jsd::Jsd;
use crate::linalg;

/// Schmidt modes and coefficients of a decomposed JSD.
///
/// `coefficients[j]` holds sqrt(d_j) in descending order; the mode columns are
/// orthonormal under their axis quadrature and the decomposition reconstructs
/// the distribution as `F(wi, wo) = sum_j sqrt(d_j) g_j(wi) h_j(wo)`.
#[derive(Debug, Clone)]
pub struct SchmidtData {
    pub coefficients: Vec<f64>,
    /// Column j: input mode g_j on the input axis.
    pub input_modes: Mat<c64>,
    /// Column j: output mode h_j on the output axis.
    pub output_modes: Mat<c64>,
    pub input_axis: FrequencyAxis,
    pub output_axis: FrequencyAxis,
    /// Schmidt number 1 / sum d_j^2, computed from the full spectrum.
    pub schmidt_number: f64,
    /// Weight 1 - sum of the retained d_j.
    pub truncated_weight: f64,
}

impl SchmidtData {
    pub fn mode_count(&self) -> usize {
        self.coefficients.len()
    }

    /// d_j for the retained modes.
    pub fn mode_weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }
}

/// Schmidt number 1 / sum d_j^2 from coefficients sqrt(d_j).
pub fn schmidt_number(coefficients: &[f64]) -> f64 {
    let sum_sq: f64 = coefficients.iter().map(|c| c.powi(4)).sum();
    1.0 / sum_sq
}

/// Decompose a normalized JSD, retaining at most `max_modes` mode pairs.
pub fn decompose(jsd: &Jsd, max_modes: usize) -> Result<SchmidtData> {
    if max_modes < 5 {
        return Err(Error::Config("max_modes must be at least 5".into()));
    }
    let norm = jsd.l2_norm_sq();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::Contract(format!(
            "JSD must be L2-normalized before decomposition (norm^2 = {norm})"
        )));
    }
    let n_i = jsd.grid.input.len();
    let n_o = jsd.grid.output.len();
    let wi = jsd.grid.input.step();
    let wo = jsd.grid.output.step();
    // Quadrature scaling: singular values of sqrt(wi wo) F approximate the
    // continuum Schmidt coefficients; a bare SVD misnormalizes on grids with
    // unequal steps.
    let scale = c64::new((wi * wo).sqrt(), 0.0);
    let mut scaled = Mat::<c64>::zeros(n_i, n_o);
    for o in 0..n_o {
        for i in 0..n_i {
            scaled[(i, o)] = jsd.amplitude[(i, o)] * scale;
        }
    }
    let (u, s, v) = linalg::svd(&scaled)?;

    let schmidt_number = 1.0 / s.iter().map(|x| x.powi(4)).sum::<f64>();
    let kept = max_modes.min(s.len());
    let retained: f64 = s[..kept].iter().map(|x| x * x).sum();

    let inv_sqrt_wi = c64::new(wi.sqrt().recip(), 0.0);
    let inv_sqrt_wo = c64::new(wo.sqrt().recip(), 0.0);
    let mut input_modes = Mat::<c64>::zeros(n_i, kept);
    let mut output_modes = Mat::<c64>::zeros(n_o, kept);
    for j in 0..kept {
        // Phase gauge: the largest-magnitude sample of g_j is real positive;
        // the compensating phase goes onto h_j so the product is unchanged.
        let mut arg = 0;
        let mut best = 0.0f64;
        for i in 0..n_i {
            let m = u[(i, j)].norm();
            if m > best {
                best = m;
                arg = i;
            }
        }
        let phase = if best > 0.0 {
            u[(arg, j)] * c64::new(1.0 / best, 0.0)
        } else {
            c64::new(1.0, 0.0)
        };
        let g_gauge = phase.conj();
        let h_gauge = phase;
        for i in 0..n_i {
            input_modes[(i, j)] = u[(i, j)] * g_gauge * inv_sqrt_wi;
        }
        for o in 0..n_o {
            output_modes[(o, j)] = v[(o, j)].conj() * h_gauge * inv_sqrt_wo;
        }
    }

    Ok(SchmidtData {
        coefficients: s[..kept].to_vec(),
        input_modes,
        output_modes,
        input_axis: jsd.grid.input.clone(),
        output_axis: jsd.grid.output.clone(),
        schmidt_number,
        truncated_weight: 1.0 - retained,
    })
}

/// Density matrix expressed in the retained input-mode basis, plus the weight
/// of the state that the basis does not capture.
#[derive(Debug, Clone)]
pub struct ModeDensityMatrix {
    pub matrix: Mat<c64>,
    pub truncation_weight: f64,
}

impl ModeDensityMatrix {
    pub fn trace(&self) -> f64 {
        (0..self.matrix.nrows()).map(|j| self.matrix[(j, j)].re).sum()
    }

    pub fn purity(&self) -> f64 {
        let m = self.matrix.nrows();
        let mut acc = 0.0;
        for k in 0..m {
            for j in 0..m {
                acc += (self.matrix[(j, k)] * self.matrix[(k, j)]).re;
            }
        }
        acc
    }

    /// Diagonal mode populations.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.matrix.nrows()).map(|j| self.matrix[(j, j)].re).collect()
    }
}

/// Four-point Lagrange interpolation of one mode column onto a target axis;
/// the modes vanish off their own grid, so out-of-range points map to zero.
fn resample_column(
    modes: &Mat<c64>,
    column: usize,
    from: &FrequencyAxis,
    onto: &FrequencyAxis,
) -> Vec<c64> {
    let n = from.len();
    (0..onto.len())
        .map(|t| {
            let w = onto.value(t);
            let pos = (w - from.start()) / from.step();
            if pos < 0.0 || pos > (n - 1) as f64 {
                return c64::new(0.0, 0.0);
            }
            // Centered 4-point stencil, clamped at the borders.
            let base = (pos.floor() as usize).saturating_sub(1).min(n - 4);
            let x = pos - base as f64;
            let mut acc = c64::new(0.0, 0.0);
            for (k, offset) in [0.0f64, 1.0, 2.0, 3.0].iter().enumerate() {
                let mut weight = 1.0;
                for other in [0.0f64, 1.0, 2.0, 3.0] {
                    if other != *offset {
                        weight *= (x - other) / (offset - other);
                    }
                }
                acc += modes[(base + k, column)] * c64::new(weight, 0.0);
            }
            acc
        })
        .collect()
}

/// Overlap matrix <g_j| rho |g_k> of a state with the input modes, without
/// any capture requirement. Used both for reporting and by the conversion
/// engine (where uncaptured weight simply does not convert).
pub fn mode_overlap_matrix(state: &PhotonState, modes: &SchmidtData) -> Result<ModeDensityMatrix> {
    let m = modes.mode_count();
    let n = state.axis.len();
    let mut sampled = Mat::<c64>::zeros(n, m);
    for j in 0..m {
        let col = resample_column(&modes.input_modes, j, &modes.input_axis, &state.axis);
        for (i, v) in col.into_iter().enumerate() {
            sampled[(i, j)] = v;
        }
    }
    // rho_tilde = G^H rho G x w^2 under the state quadrature.
    let w = state.axis.step();
    let rho_g = linalg::matmul(&state.rho, &sampled);
    let mut matrix = linalg::matmul(&sampled.adjoint().to_owned(), &rho_g);
    let w2 = c64::new(w * w, 0.0);
    for k in 0..m {
        for j in 0..m {
            matrix[(j, k)] *= w2;
        }
    }
    let trace: f64 = (0..m).map(|j| matrix[(j, j)].re).sum();
    Ok(ModeDensityMatrix {
        matrix,
        truncation_weight: 1.0 - trace,
    })
}

const PROJECTION_TRUNCATION_LIMIT: f64 = 0.01;

/// Project a photon state onto the input Schmidt modes, requiring the basis
/// to capture all but 1% of the state.
pub fn project_onto_input_modes(
    state: &PhotonState,
    modes: &SchmidtData,
) -> Result<ModeDensityMatrix> {
    let projected = mode_overlap_matrix(state, modes)?;
    if projected.truncation_weight > PROJECTION_TRUNCATION_LIMIT {
        return Err(Error::InsufficientModes {
            weight: projected.truncation_weight,
            limit: PROJECTION_TRUNCATION_LIMIT,
        });
    }
    Ok(projected)
}
