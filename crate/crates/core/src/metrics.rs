//! Figures of merit for bounds curves: the tolerance index, the signed
//! inclusion metric against a Monte Carlo band, min-index selection among
//! repeated trainings and array pattern features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::mc::MCBand;
use crate::surrogate::BoundsCurve;

/// Integration variable used for the area integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    /// The grid values themselves.
    #[default]
    Theta,
    /// `sin` of the grid values (direction cosine for angular grids).
    SinTheta,
}

/// Curve whose area normalises the tolerance index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// `|Φ|`.
    #[default]
    Response,
    /// `sqrt|Φ|`, the field amplitude of a power pattern.
    Amplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReportingConvention {
    pub abscissa: Abscissa,
    pub reference: Reference,
}

impl ReportingConvention {
    /// Convention for array power patterns: integrate over `u = sin θ` and
    /// normalise widths by the nominal amplitude pattern.
    pub fn array() -> Self {
        ReportingConvention { abscissa: Abscissa::SinTheta, reference: Reference::Amplitude }
    }

    fn abscissa(&self, grid: &[f64]) -> Vec<f64> {
        match self.abscissa {
            Abscissa::Theta => grid.to_vec(),
            Abscissa::SinTheta => grid.iter().map(|t| t.sin()).collect(),
        }
    }
}

/// Composite trapezoid with `|Δx|`, so the direction of the grid does not
/// matter.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]).abs() * (ys[0] + ys[1])).sum()
}

fn check_grid(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { what, expected, got });
    }
    Ok(())
}

/// `∫(sup - inf) / ∫|Φ|` under the default convention.
pub fn tolerance_index(bounds: &BoundsCurve, nominal: &[f64]) -> Result<f64> {
    tolerance_index_with(bounds, nominal, ReportingConvention::default())
}

pub fn tolerance_index_with(bounds: &BoundsCurve, nominal: &[f64], conv: ReportingConvention) -> Result<f64> {
    check_grid("nominal curve length", bounds.len(), nominal.len())?;
    let x = conv.abscissa(&bounds.theta_grid);
    let width: Vec<f64> = bounds.widths().iter().map(|w| w.abs()).collect();
    let reference: Vec<f64> = nominal
        .iter()
        .map(|v| match conv.reference {
            Reference::Response => v.abs(),
            Reference::Amplitude => v.abs().sqrt(),
        })
        .collect();
    let den = trapezoid(&x, &reference);
    if !(den > 0.0) {
        return Err(Error::ZeroNormalisation("nominal response integrates to zero"));
    }
    Ok(trapezoid(&x, &width) / den)
}

/// Signed inclusion metric and its three area terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub psi: f64,
    /// Area by which the bounds fall inside the reference band.
    pub psi_int: f64,
    /// Area by which the bounds extend beyond the reference band.
    pub psi_ext: f64,
    /// Area by which the nominal curve escapes the bounds.
    pub psi_pen: f64,
}

impl InclusionReport {
    fn assemble(psi_int: f64, psi_ext: f64, psi_pen: f64) -> Self {
        let psi = if psi_int == 0.0 { psi_ext } else { -(psi_int + psi_pen) };
        InclusionReport { psi, psi_int, psi_ext, psi_pen }
    }
}

/// `max(v, 0)` with `H(0) = 0`.
#[inline]
fn ramp(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

pub fn inclusion_metric(ia: &BoundsCurve, mc: &MCBand, nominal: &[f64]) -> Result<InclusionReport> {
    inclusion_metric_with(ia, mc, nominal, ReportingConvention::default())
}

pub fn inclusion_metric_with(
    ia: &BoundsCurve,
    mc: &MCBand,
    nominal: &[f64],
    conv: ReportingConvention,
) -> Result<InclusionReport> {
    let k = ia.len();
    check_grid("reference band length", k, mc.inf.len())?;
    check_grid("nominal curve length", k, nominal.len())?;
    let x = conv.abscissa(&ia.theta_grid);
    let area = |f: &dyn Fn(usize) -> f64| {
        let y: Vec<f64> = (0..k).map(f).collect();
        trapezoid(&x, &y)
    };
    let den = area(&|i| mc.sup[i] - mc.inf[i]);
    if !(den > 0.0) {
        return Err(Error::ZeroNormalisation("reference band has zero total width"));
    }
    let psi_int = area(&|i| ramp(ia.inf[i] - mc.inf[i]) + ramp(mc.sup[i] - ia.sup[i])) / den;
    let psi_ext = area(&|i| ramp(mc.inf[i] - ia.inf[i]) + ramp(ia.sup[i] - mc.sup[i])) / den;
    let psi_pen = area(&|i| ramp(ia.inf[i] - nominal[i]) + ramp(nominal[i] - ia.sup[i])) / den;
    Ok(InclusionReport::assemble(psi_int, psi_ext, psi_pen))
}

/// Picks the candidate with the smallest tolerance index; ties go to the
/// lowest seed.
pub fn select_min_delta(
    candidates: Vec<(BoundsCurve, u64)>,
    nominal: &[f64],
    conv: ReportingConvention,
) -> Result<(BoundsCurve, u64, f64)> {
    let mut best: Option<(BoundsCurve, u64, f64)> = None;
    for (curve, seed) in candidates {
        let d = tolerance_index_with(&curve, nominal, conv)?;
        let better = match &best {
            None => true,
            Some((_, bs, bd)) => d < *bd || (d == *bd && seed < *bs),
        };
        if better {
            best = Some((curve, seed, d));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no candidate curves to select from".into()))
}

/// Interval ranges of the main pattern features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureIntervals {
    /// Peak sidelobe relative to the peak, dB.
    pub sll_db: Interval,
    /// Half-power beamwidth in `u = sin θ`.
    pub beamwidth: Interval,
    /// Pattern maximum, dB.
    pub peak_db: Interval,
}

fn db(v: f64) -> f64 {
    10.0 * v.log10()
}

fn max_of<'a>(v: impl IntoIterator<Item = &'a f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
}

/// Feature intervals of a power pattern envelope. The main lobe is the
/// region around the nominal maximum delimited by the first minimum on each
/// side; everything outside it counts as sidelobe. The sidelobe range pairs
/// the lowest sidelobe envelope with the highest peak and vice versa, and
/// the beamwidth range uses the half-power crossings of the lower envelope
/// against the upper peak (narrowest) and of the upper envelope against the
/// lower peak (widest).
pub fn pattern_features(curve: &BoundsCurve, nominal: &[f64]) -> Result<FeatureIntervals> {
    let k = curve.len();
    check_grid("nominal curve length", k, nominal.len())?;
    if k < 3 {
        return Err(Error::NoSidelobe);
    }
    let k0 = (0..k).fold(0, |b, i| if nominal[i] > nominal[b] { i } else { b });
    let mut l = k0;
    while l > 0 && nominal[l - 1] <= nominal[l] {
        l -= 1;
    }
    let mut r = k0;
    while r + 1 < k && nominal[r + 1] <= nominal[r] {
        r += 1;
    }
    let side = |v: &[f64]| max_of(v[..l].iter().chain(&v[r + 1..]));
    if l == 0 && r == k - 1 {
        return Err(Error::NoSidelobe);
    }
    let (inf, sup) = (&curve.inf, &curve.sup);
    let (pk_lo, pk_hi) = (max_of(inf), max_of(sup));
    if !(pk_lo > 0.0) {
        return Err(Error::ZeroNormalisation("pattern peak is not positive"));
    }
    let u: Vec<f64> = curve.theta_grid.iter().map(|t| t.sin()).collect();
    let width = |c: &[f64], reference: f64| half_power_width(&u, c, k0, reference / 2.0);
    let sll = Interval::hull(db(side(inf) / pk_hi), db(side(sup) / pk_lo))?;
    let bw = Interval::hull(width(inf, pk_hi), width(sup, pk_lo))?;
    Ok(FeatureIntervals { sll_db: sll, beamwidth: bw, peak_db: Interval::new(db(pk_lo), db(pk_hi))? })
}

/// Width in `u` of the contiguous region around `k0` where `c >= level`,
/// with linearly interpolated crossings.
fn half_power_width(u: &[f64], c: &[f64], k0: usize, level: f64) -> f64 {
    if c[k0] < level {
        return 0.0;
    }
    let k = c.len();
    let cross = |i: usize, j: usize| {
        let (a, b) = (c[i] - level, c[j] - level);
        u[i] + (u[j] - u[i]) * a / (a - b)
    };
    let mut a = k0;
    while a > 0 && c[a - 1] >= level {
        a -= 1;
    }
    let mut b = k0;
    while b + 1 < k && c[b + 1] >= level {
        b += 1;
    }
    let left = if a == 0 { u[0] } else { cross(a - 1, a) };
    let right = if b + 1 == k { u[k - 1] } else { cross(b, b + 1) };
    (right - left).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::Provenance;

    fn grid(k: usize) -> Vec<f64> {
        (0..k).map(|i| -1.0 + 2.0 * i as f64 / (k - 1) as f64).collect()
    }

    fn band(theta: &[f64], lo: Vec<f64>, hi: Vec<f64>) -> MCBand {
        MCBand { theta_grid: theta.to_vec(), inf: lo, sup: hi, m_realizations: 10 }
    }

    #[test]
    fn tolerance_index_examples() {
        let t = grid(101);
        let nom: Vec<f64> = t.iter().map(|x| 1.0 + x * x).collect();
        let zero = BoundsCurve::degenerate(t.clone(), nom.clone(), Provenance::IaLbe).unwrap();
        assert_eq!(tolerance_index(&zero, &nom).unwrap(), 0.0);
        let half = BoundsCurve::new(
            t.clone(),
            nom.iter().map(|v| v - v.abs() / 2.0).collect(),
            nom.iter().map(|v| v + v.abs() / 2.0).collect(),
            Provenance::IaLbe,
        )
        .unwrap();
        assert!((tolerance_index(&half, &nom).unwrap() - 1.0).abs() < 1e-12);
        let zeros = vec![0.0; 101];
        assert!(matches!(tolerance_index(&zero, &zeros), Err(Error::ZeroNormalisation(_))));
    }

    #[test]
    fn inclusion_identity_and_containment() {
        let t = grid(51);
        let lo: Vec<f64> = t.iter().map(|x| x - 0.1).collect();
        let hi: Vec<f64> = t.iter().map(|x| x + 0.1).collect();
        let mc = band(&t, lo.clone(), hi.clone());
        let same = BoundsCurve::new(t.clone(), lo.clone(), hi.clone(), Provenance::IaE).unwrap();
        let r = inclusion_metric(&same, &mc, &t).unwrap();
        assert_eq!((r.psi, r.psi_int, r.psi_ext, r.psi_pen), (0.0, 0.0, 0.0, 0.0));

        let wide = BoundsCurve::new(
            t.clone(),
            lo.iter().map(|v| v - 0.05).collect(),
            hi.iter().map(|v| v + 0.05).collect(),
            Provenance::IaE,
        )
        .unwrap();
        let r = inclusion_metric(&wide, &mc, &t).unwrap();
        assert!(r.psi > 0.0 && r.psi == r.psi_ext && r.psi_int == 0.0);
        assert!((r.psi - 0.5).abs() < 1e-12);
    }

    #[test]
    fn under_coverage_is_negative_with_penalty() {
        let t = grid(51);
        let mc = band(&t, vec![-1.0; 51], vec![1.0; 51]);
        let nominal = vec![0.0; 51];
        let ia = BoundsCurve::new(t.clone(), vec![0.5; 51], vec![0.9; 51], Provenance::IaLbe).unwrap();
        let r = inclusion_metric(&ia, &mc, &nominal).unwrap();
        assert!((r.psi_int - 0.8).abs() < 1e-12);
        assert!((r.psi_pen - 0.25).abs() < 1e-12);
        assert!((r.psi + 1.05).abs() < 1e-12);
        let flat = band(&t, vec![0.0; 51], vec![0.0; 51]);
        assert!(inclusion_metric(&ia, &flat, &nominal).is_err());
    }

    #[test]
    fn reversed_grid_gives_same_metrics() {
        let t = grid(41);
        let nom: Vec<f64> = t.iter().map(|x| (3.0 * x).sin() + 2.0).collect();
        let ia_lo: Vec<f64> = nom.iter().enumerate().map(|(i, v)| v - 0.1 - 0.01 * i as f64).collect();
        let ia_hi: Vec<f64> = nom.iter().map(|v| v + 0.2).collect();
        let mc_lo: Vec<f64> = nom.iter().map(|v| v - 0.15).collect();
        let mc_hi: Vec<f64> = nom.iter().map(|v| v + 0.15).collect();
        let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
        for conv in [ReportingConvention::default(), ReportingConvention::array()] {
            let a = BoundsCurve::new(t.clone(), ia_lo.clone(), ia_hi.clone(), Provenance::IaLbe).unwrap();
            let b = BoundsCurve::new(rev(&t), rev(&ia_lo), rev(&ia_hi), Provenance::IaLbe).unwrap();
            let ma = band(&t, mc_lo.clone(), mc_hi.clone());
            let mb = band(&rev(&t), rev(&mc_lo), rev(&mc_hi));
            let ra = inclusion_metric_with(&a, &ma, &nom, conv).unwrap();
            let rb = inclusion_metric_with(&b, &mb, &rev(&nom), conv).unwrap();
            assert!((ra.psi - rb.psi).abs() < 1e-12);
            let da = tolerance_index_with(&a, &nom, conv).unwrap();
            let db = tolerance_index_with(&b, &rev(&nom), conv).unwrap();
            assert!((da - db).abs() < 1e-12);
        }
    }

    #[test]
    fn min_delta_selection() {
        let t = grid(11);
        let nom = vec![1.0; 11];
        let narrow = BoundsCurve::new(t.clone(), vec![0.9; 11], vec![1.1; 11], Provenance::IaLbe).unwrap();
        let wide = BoundsCurve::new(t.clone(), vec![0.5; 11], vec![1.5; 11], Provenance::IaLbe).unwrap();
        let conv = ReportingConvention::default();
        let (_, s, _) = select_min_delta(vec![(narrow.clone(), 4)], &nom, conv).unwrap();
        assert_eq!(s, 4);
        let (c, s, _) = select_min_delta(vec![(wide.clone(), 1), (narrow.clone(), 9)], &nom, conv).unwrap();
        assert_eq!((s, c), (9, narrow.clone()));
        let (_, s, _) = select_min_delta(vec![(narrow.clone(), 7), (narrow.clone(), 3)], &nom, conv).unwrap();
        assert_eq!(s, 3);
        let (_, s, _) = select_min_delta(vec![(narrow.clone(), 3), (narrow, 7)], &nom, conv).unwrap();
        assert_eq!(s, 3);
        assert!(select_min_delta(vec![], &nom, conv).is_err());
    }

    #[test]
    fn features_of_degenerate_curve_are_points() {
        let b = crate::benchmarks::ArrayBenchmark::standard(10).unwrap();
        use crate::benchmarks::TransferFunction;
        let nom = b.eval_curve(&b.nominal().unwrap());
        let c = BoundsCurve::degenerate(b.theta_grid().to_vec(), nom.clone(), Provenance::IaE).unwrap();
        let f = pattern_features(&c, &nom).unwrap();
        assert!(f.sll_db.is_degenerate() && f.beamwidth.is_degenerate() && f.peak_db.is_degenerate());
        assert!((f.sll_db.lo() + 20.0).abs() < 0.1, "{}", f.sll_db);
        assert!((f.peak_db.lo() - 17.92).abs() < 0.15);
        assert!((f.beamwidth.lo() - 0.20).abs() < 0.01);
    }

    #[test]
    fn monotone_curve_has_no_sidelobe() {
        let t = grid(21);
        let v: Vec<f64> = t.iter().map(|x| 2.0 - x * x).collect();
        let c = BoundsCurve::degenerate(t, v.clone(), Provenance::IaE).unwrap();
        assert!(matches!(pattern_features(&c, &v), Err(Error::NoSidelobe)));
    }
}
