use super::{SpanProgram, VectorKind};
use crate::error::{Error, Result};

fn check_weights(s1: f64, s2: f64) -> Result<()> {
    for s in [s1, s2] {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::NonPositiveWeight(s));
        }
    }
    Ok(())
}

/// `(s_j / (s_1 + s_2))^(1/4)` for `j = 1, 2`.
pub fn balance_weights(s1: f64, s2: f64) -> [f64; 2] {
    let sp = s1 + s2;
    [(s1 / sp).powf(0.25), (s2 / sp).powf(0.25)]
}

fn input(j: usize) -> VectorKind {
    VectorKind::Input { j, b: true }
}

/// Strict monotone program for `AND_2`: target `(alpha_1, alpha_2)`,
/// `v_1 = e_1`, `v_2 = e_2`, with `alpha_j = (s_j / s_p)^(1/4)`.
pub fn make_and(s1: f64, s2: f64) -> Result<SpanProgram> {
    check_weights(s1, s2)?;
    let [a1, a2] = balance_weights(s1, s2);
    SpanProgram::from_columns(
        2,
        vec![a1, a2],
        vec![
            (input(0), "i1".into(), vec![1.0, 0.0]),
            (input(1), "i2".into(), vec![0.0, 1.0]),
        ],
    )
}

/// Strict monotone program for `OR_2`: target `1`, `v_j = epsilon_j`, with
/// `epsilon_j = (s_j / s_p)^(1/4)`.
pub fn make_or(s1: f64, s2: f64) -> Result<SpanProgram> {
    check_weights(s1, s2)?;
    let [e1, e2] = balance_weights(s1, s2);
    SpanProgram::from_columns(
        2,
        vec![1.0],
        vec![
            (input(0), "i1".into(), vec![e1]),
            (input(1), "i2".into(), vec![e2]),
        ],
    )
}

/// One-bit program computing `x_1`.
pub fn passthrough() -> SpanProgram {
    SpanProgram::from_columns(1, vec![1.0], vec![(input(0), "i1".into(), vec![1.0])])
        .expect("well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn and_parameters() {
        let p = make_and(1.0, 1.0).unwrap();
        let a = 2f64.powf(-0.25);
        assert!((p.target()[0] - a).abs() < 1e-15 && (p.target()[1] - a).abs() < 1e-15);
        let p = make_and(3.0, 1.0).unwrap();
        assert!((p.target()[0] - 0.75f64.powf(0.25)).abs() < 1e-15);
        assert!((p.target()[1] - 0.25f64.powf(0.25)).abs() < 1e-15);
        assert!(p.is_strict() && p.is_monotone());
    }

    #[test]
    fn or_parameters() {
        let p = make_or(1.0, 1.0).unwrap();
        let e = p.matrix().column(0).norm_squared() + p.matrix().column(1).norm_squared();
        assert!((e.sqrt() - 2f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(matches!(
            make_and(0.0, 1.0),
            Err(Error::NonPositiveWeight(_))
        ));
        assert!(make_or(1.0, -2.0).is_err());
        assert!(make_or(f64::NAN, 1.0).is_err());
    }
}
