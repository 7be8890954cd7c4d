use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `Σ E†E = I` accepted by [`KrausChannel::new`].
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// A single-qubit CPTP map in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    operators: Vec<Matrix2<Complex64>>,
}

impl KrausChannel {
    pub fn new(operators: Vec<Matrix2<Complex64>>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::domain("a channel needs at least one Kraus operator"));
        }
        let channel = KrausChannel { operators };
        let err = channel.completeness_error();
        if err > COMPLETENESS_TOL {
            return Err(Error::domain(format!(
                "Kraus operators are not complete (max deviation {err:e})"
            )));
        }
        Ok(channel)
    }

    pub fn identity() -> Self {
        KrausChannel {
            operators: vec![Matrix2::identity()],
        }
    }

    pub fn operators(&self) -> &[Matrix2<Complex64>] {
        &self.operators
    }

    /// Largest entrywise deviation of `Σ E_i† E_i` from the identity.
    pub fn completeness_error(&self) -> f64 {
        let sum: Matrix2<Complex64> = self.operators.iter().map(|e| e.adjoint() * e).sum();
        (sum - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Superoperator acting on the four entries `(ρ00, ρ01, ρ10, ρ11)` of a
    /// single-qubit block: `S[(a,b),(c,d)] = Σ_k E_k[a,c] conj(E_k[b,d])`.
    pub(crate) fn superoperator(&self) -> [[Complex64; 4]; 4] {
        let mut s = [[Complex64::new(0.0, 0.0); 4]; 4];
        for e in &self.operators {
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        for d in 0..2 {
                            s[2 * a + b][2 * c + d] += e[(a, c)] * e[(b, d)].conj();
                        }
                    }
                }
            }
        }
        s
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {p} is not a probability")))
    }
}

/// Combined amplitude- and phase-damping channel with three Kraus operators:
///
/// ```text
/// E0 = [[1, 0], [0, sqrt(1-p_ad) sqrt(1-p_pd)]]
/// E1 = [[0, sqrt(p_ad)], [0, 0]]
/// E2 = [[0, 0], [0, sqrt(1-p_ad) sqrt(p_pd)]]
/// ```
pub fn damping_channel(p_ad: f64, p_pd: f64) -> Result<KrausChannel> {
    check_probability("p_ad", p_ad)?;
    check_probability("p_pd", p_pd)?;
    let c = |x: f64| Complex64::new(x, 0.0);
    let zero = c(0.0);
    let keep = (1.0 - p_ad).sqrt();
    let e0 = Matrix2::new(c(1.0), zero, zero, c(keep * (1.0 - p_pd).sqrt()));
    let e1 = Matrix2::new(zero, c(p_ad.sqrt()), zero, zero);
    let e2 = Matrix2::new(zero, zero, zero, c(keep * p_pd.sqrt()));
    KrausChannel::new(vec![e0, e1, e2])
}
