//! Induced polarizations from pulse sequences.
//!
//! In the impulsive limit the polarization is the phase-matched response at
//! the pulse delays times the pulse areas. For finite Gaussian pulses the
//! convolution of the fields with the response is evaluated by a midpoint
//! rule over the truncated envelopes. Each field factor is the analytic
//! signal `A g(t) exp(-i s w (t - t_j))` of its `s k_j` component and pairs
//! with the matching raising or lowering part of `mu`.
//!
//! The quadrature is organised as a forward recursion over interaction
//! times rather than a triple loop over delays: the state after `k`
//! interactions is accumulated at every node of pulse `k` and then
//! propagated onward. All orderings of the pulses in time are included, so
//! overlapping pulses are handled.

use num_complex::Complex64 as C64;

use super::{apply_vertex, check_inputs, select_phase_matched_op, Sign, SignPattern, Vertex};
use crate::dynamics::{propagate_with, propagation_factors, DephasingModel};
use crate::error::{Error, Result};
use crate::model::ExcitonModel;
use crate::operator::{expectation, DensityMatrix, Operator};
use crate::pulse::{check_ordered, PulseEvent, PulseMode};

/// Largest relative change allowed when the quadrature step is halved.
pub const QUADRATURE_TOLERANCE: f64 = 1e-4;

fn delays_from_arrivals(pulses: &[PulseEvent], detection: f64) -> Result<Vec<f64>> {
    let last = pulses.last().map(|p| p.arrival).unwrap_or(detection);
    if detection < last {
        return Err(Error::DetectionBeforePulse {
            detection,
            last_pulse: last,
        });
    }
    let mut delays: Vec<f64> = pulses.windows(2).map(|w| w[1].arrival - w[0].arrival).collect();
    delays.push(detection - last);
    Ok(delays)
}

/// Impulsive-limit polarization `(prod areas) x S_pattern(delays)`.
///
/// The input state is taken at the arrival of the first pulse.
pub fn polarization_impulsive(
    pulses: &[PulseEvent],
    detection: f64,
    pattern: &SignPattern,
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho_in: &DensityMatrix,
) -> Result<C64> {
    polarization_impulsive_op(pulses, detection, pattern, model, noise, rho_in.operator())
}

pub(crate) fn polarization_impulsive_op(
    pulses: &[PulseEvent],
    detection: f64,
    pattern: &SignPattern,
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho_in: &Operator,
) -> Result<C64> {
    check_ordered(pulses)?;
    if let Some(p) = pulses.iter().find(|p| p.mode != PulseMode::Impulsive) {
        return Err(Error::InvalidParameter {
            name: "pulse.mode",
            reason: format!("pulse at {} is not impulsive", p.arrival),
        });
    }
    pattern.check_arity(pulses.len())?;
    let delays = delays_from_arrivals(pulses, detection)?;
    let areas: f64 = pulses.iter().map(|p| p.area).product();
    Ok(select_phase_matched_op(pattern, &delays, model, noise, rho_in)? * areas)
}

/// Convolved polarization with the input state given just before the
/// earliest pulse envelope starts.
#[allow(clippy::too_many_arguments)]
pub fn polarization_convolved(
    pulses: &[PulseEvent],
    detection: f64,
    pattern: &SignPattern,
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho_in: &DensityMatrix,
    step: f64,
) -> Result<C64> {
    let input_time = pulses
        .iter()
        .map(|p| p.support().0)
        .fold(f64::INFINITY, f64::min);
    polarization_convolved_from(pulses, detection, pattern, model, noise, rho_in, input_time, step)
}

/// Convolved polarization with the input state given at `input_time`.
///
/// Envelope portions before `input_time` or after `detection` are dropped.
/// The result at `step / 2` is returned after checking it agrees with the
/// result at `step` to [`QUADRATURE_TOLERANCE`].
#[allow(clippy::too_many_arguments)]
pub fn polarization_convolved_from(
    pulses: &[PulseEvent],
    detection: f64,
    pattern: &SignPattern,
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho_in: &DensityMatrix,
    input_time: f64,
    step: f64,
) -> Result<C64> {
    polarization_convolved_op(
        pulses,
        detection,
        pattern,
        model,
        noise,
        rho_in.operator(),
        input_time,
        step,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn polarization_convolved_op(
    pulses: &[PulseEvent],
    detection: f64,
    pattern: &SignPattern,
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho_in: &Operator,
    input_time: f64,
    step: f64,
) -> Result<C64> {
    check_ordered(pulses)?;
    pattern.check_arity(pulses.len())?;
    delays_from_arrivals(pulses, detection)?;
    check_inputs(&vec![0.0; pulses.len()], model, noise, rho_in)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "quadrature_step",
            reason: format!("must be positive, got {step}"),
        });
    }
    if !input_time.is_finite() {
        return Err(Error::InvalidParameter {
            name: "input_time",
            reason: "must be finite".into(),
        });
    }
    let signs = pattern.signs();
    let coarse = convolve(pulses, signs, detection, model, noise, rho_in, input_time, step);
    let fine = convolve(pulses, signs, detection, model, noise, rho_in, input_time, 0.5 * step);

    // Values that cancel exactly are compared against a size estimate
    // instead of themselves.
    let mu_scale = model.mu().max_abs() * model.dim() as f64;
    let floor = 1e-13
        * pulses.iter().map(|p| p.area.abs()).product::<f64>()
        * mu_scale.powi(pulses.len() as i32 + 1);
    let change = (coarse - fine).norm();
    if change > QUADRATURE_TOLERANCE * fine.norm() && change > floor {
        return Err(Error::Quadrature {
            relative_change: change / fine.norm().max(f64::MIN_POSITIVE),
        });
    }
    Ok(fine)
}

/// Quadrature nodes `(time, weight x field)` of one pulse.
fn nodes(pulse: &PulseEvent, sign: Sign, start: f64, end: f64, step: f64) -> Vec<(f64, C64)> {
    match pulse.mode {
        PulseMode::Impulsive => {
            if pulse.arrival >= start && pulse.arrival <= end {
                vec![(pulse.arrival, C64::new(pulse.area, 0.0))]
            } else {
                Vec::new()
            }
        }
        PulseMode::Finite => {
            let (lo, hi) = pulse.support();
            let (lo, hi) = (lo.max(start), hi.min(end));
            if hi <= lo {
                return Vec::new();
            }
            let n = ((hi - lo) / step).ceil().max(1.0) as usize;
            let h = (hi - lo) / n as f64;
            (0..n)
                .map(|m| {
                    let t = lo + (m as f64 + 0.5) * h;
                    (t, pulse.analytic_field(t, sign.as_i8()) * h)
                })
                .collect()
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for perm in permutations(n - 1) {
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn convolve(
    pulses: &[PulseEvent],
    signs: &[Sign],
    detection: f64,
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho_in: &Operator,
    input_time: f64,
    step: f64,
) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    for perm in permutations(pulses.len()) {
        let stages: Vec<Vec<(f64, C64)>> = perm
            .iter()
            .map(|&k| nodes(&pulses[k], signs[k], input_time, detection, step))
            .collect();
        if stages.iter().any(Vec::is_empty) {
            continue;
        }
        // Stages cannot be causally ordered if they do not overlap in time.
        let feasible = stages
            .windows(2)
            .all(|w| w[0].first().unwrap().0 <= w[1].last().unwrap().0);
        if !feasible {
            continue;
        }

        let first_sign = signs[perm[0]];
        let mut states: Vec<(f64, Operator)> = stages[0]
            .iter()
            .map(|&(t, w)| {
                let x = propagate_with(rho_in, &propagation_factors(model, noise, t - input_time));
                (t, apply_vertex(&x, Vertex::Component(first_sign), model).scale(w))
            })
            .collect();

        for (stage, &k) in stages.iter().zip(&perm).skip(1) {
            let sign = signs[k];
            states = stage
                .iter()
                .filter_map(|&(t, w)| {
                    let mut acc: Option<Operator> = None;
                    for (tp, x) in &states {
                        let weight = if *tp < t {
                            1.0
                        } else if *tp == t {
                            0.5
                        } else {
                            continue;
                        };
                        let y = propagate_with(x, &propagation_factors(model, noise, t - tp))
                            .scale(C64::new(weight, 0.0));
                        acc = Some(match acc {
                            Some(a) => &a + &y,
                            None => y,
                        });
                    }
                    acc.map(|a| (t, apply_vertex(&a, Vertex::Component(sign), model).scale(w)))
                })
                .collect();
        }

        for (t, x) in &states {
            let y = propagate_with(x, &propagation_factors(model, noise, detection - t));
            total += expectation(model.mu(), &y).expect("dimensions checked");
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_dimer, build_general, eigenstate, DimerParams};
    use crate::response::select_phase_matched;

    fn dimer() -> ExcitonModel {
        build_dimer(&DimerParams::new(10.0, 9.0, 0.5).with_dipoles(1.0, -0.4)).unwrap()
    }

    fn impulsive_train(areas: [f64; 3]) -> Vec<PulseEvent> {
        vec![
            PulseEvent::impulsive(0.0, areas[0], 1),
            PulseEvent::impulsive(0.6, areas[1], 2),
            PulseEvent::impulsive(1.5, areas[2], 3),
        ]
    }

    #[test]
    fn unit_areas_reproduce_phase_matched_response() {
        let model = dimer();
        let noise = DephasingModel::uniform(4, 0.1).unwrap();
        let g = eigenstate(&model, "g").unwrap();
        let p = SignPattern::rephasing();
        let pol = polarization_impulsive(&impulsive_train([1.0; 3]), 2.4, &p, &model, &noise, &g)
            .unwrap();
        let s = select_phase_matched(&p, &[0.6, 0.9, 0.9], &model, &noise, &g).unwrap();
        assert!((pol - s).norm() < 1e-13);
    }

    #[test]
    fn third_order_is_trilinear_in_areas() {
        let model = dimer();
        let noise = DephasingModel::uniform(4, 0.1).unwrap();
        let g = eigenstate(&model, "g").unwrap();
        let p = SignPattern::non_rephasing();
        let a = polarization_impulsive(&impulsive_train([0.3, 0.5, 0.7]), 2.0, &p, &model, &noise, &g)
            .unwrap();
        let b = polarization_impulsive(&impulsive_train([0.6, 1.0, 1.4]), 2.0, &p, &model, &noise, &g)
            .unwrap();
        assert!((b - a * 8.0).norm() < 1e-14 * b.norm());
    }

    #[test]
    fn second_order_polarization_vanishes_on_dimer() {
        let model = dimer();
        let g = eigenstate(&model, "g").unwrap();
        let pulses = [PulseEvent::impulsive(0.0, 1.0, 1), PulseEvent::impulsive(1.0, 1.0, 3)];
        for pattern in SignPattern::all(2).unwrap() {
            let v = polarization_impulsive(&pulses, 2.0, &pattern, &model, &DephasingModel::none(4), &g)
                .unwrap();
            assert_eq!(v.norm(), 0.0);
        }
    }

    #[test]
    fn detection_before_last_pulse_is_an_error() {
        let model = dimer();
        let g = eigenstate(&model, "g").unwrap();
        let err = polarization_impulsive(
            &impulsive_train([1.0; 3]),
            1.0,
            &SignPattern::rephasing(),
            &model,
            &DephasingModel::none(4),
            &g,
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::DetectionBeforePulse {
                detection: 1.0,
                last_pulse: 1.5
            }
        );
    }

    #[test]
    fn impulsive_pulses_pass_through_the_quadrature_exactly() {
        let model = dimer();
        let noise = DephasingModel::uniform(4, 0.3).unwrap();
        let g = eigenstate(&model, "g").unwrap();
        let pulses = impulsive_train([0.4, 0.9, 1.1]);
        let p = SignPattern::rephasing();
        let a = polarization_impulsive(&pulses, 2.2, &p, &model, &noise, &g).unwrap();
        let b = polarization_convolved(&pulses, 2.2, &p, &model, &noise, &g, 0.01).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn narrow_pulses_approach_impulsive_limit() {
        let model = dimer();
        let noise = DephasingModel::uniform(4, 0.2).unwrap();
        let g = eigenstate(&model, "g").unwrap();
        let p = SignPattern::rephasing();
        let arrivals = [0.0, 0.8, 1.9];
        let detection = 3.0;
        let impulsive: Vec<PulseEvent> = arrivals
            .iter()
            .enumerate()
            .map(|(k, &a)| PulseEvent::impulsive(a, 1.0, k + 1))
            .collect();
        let target = polarization_impulsive(&impulsive, detection, &p, &model, &noise, &g).unwrap();
        let mut last_err = f64::INFINITY;
        for width in [0.02, 0.01, 0.004] {
            let finite: Vec<PulseEvent> = arrivals
                .iter()
                .enumerate()
                .map(|(k, &a)| PulseEvent::gaussian(a, 1.0, width, 9.5, k + 1))
                .collect();
            let v = polarization_convolved(&finite, detection, &p, &model, &noise, &g, width / 2.0)
                .unwrap();
            let err = (v - target).norm() / target.norm();
            assert!(err < last_err);
            last_err = err;
        }
        assert!(last_err < 1e-3, "relative error {last_err}");
    }

    #[test]
    fn zero_field_gives_zero_polarization() {
        let model = dimer();
        let g = eigenstate(&model, "g").unwrap();
        let pulses: Vec<PulseEvent> = (0..3)
            .map(|k| PulseEvent::gaussian(k as f64, 0.0, 0.1, 9.5, k + 1))
            .collect();
        let v = polarization_convolved(
            &pulses,
            3.0,
            &SignPattern::rephasing(),
            &model,
            &DephasingModel::none(4),
            &g,
            0.02,
        )
        .unwrap();
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn coarse_quadrature_is_reported() {
        let model = build_general(&[10.0], &[vec![0.0]], &[1.0], false).unwrap();
        let g = eigenstate(&model, "g").unwrap();
        // Far off resonance the integrand oscillates and a coarse grid fails.
        let pulses = [PulseEvent::gaussian(0.0, 1.0, 1.0, 0.0, 1)];
        let err = polarization_convolved(
            &pulses,
            6.0,
            &"+".parse().unwrap(),
            &model,
            &DephasingModel::none(2),
            &g,
            0.5,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn step_halving_is_self_consistent() {
        let model = dimer();
        let noise = DephasingModel::uniform(4, 0.2).unwrap();
        let g = eigenstate(&model, "g").unwrap();
        let pulses: Vec<PulseEvent> = [0.0, 1.5, 3.0]
            .iter()
            .enumerate()
            .map(|(k, &a)| PulseEvent::gaussian(a, 1.0, 0.15, 9.5, k + 1))
            .collect();
        let p = SignPattern::rephasing();
        let a = polarization_convolved(&pulses, 4.0, &p, &model, &noise, &g, 0.05).unwrap();
        let b = polarization_convolved(&pulses, 4.0, &p, &model, &noise, &g, 0.025).unwrap();
        assert!((a - b).norm() < QUADRATURE_TOLERANCE * b.norm());
    }

    #[test]
    fn overlapping_pulses_include_all_orderings() {
        // Brute force over node pairs of two overlapping pulses, each pair
        // evaluated as an impulsive chain in its actual time order.
        let model = build_general(&[1.0], &[vec![0.0]], &[1.0], false).unwrap();
        let g = eigenstate(&model, "g").unwrap();
        let noise = DephasingModel::uniform(2, 0.1).unwrap();
        let a = PulseEvent::gaussian(0.0, 0.5, 0.12, 1.0, 1);
        let b = PulseEvent::gaussian(0.013, 0.7, 0.12, 1.0, 2);
        let c = PulseEvent::impulsive(2.5, 1.0, 3);
        let (sa, sb, sc) = (Sign::Plus, Sign::Minus, Sign::Plus);
        let step = 0.02;
        let got = polarization_convolved(&[a, b, c], 3.0, &"+-+".parse().unwrap(), &model, &noise, &g, step)
            .unwrap();

        let grid = |p: &PulseEvent, s: Sign| {
            let (lo, hi) = p.support();
            let n = ((hi - lo) / (0.5 * step)).ceil() as usize;
            let h = (hi - lo) / n as f64;
            (0..n)
                .map(|m| {
                    let t = lo + (m as f64 + 0.5) * h;
                    (t, p.analytic_field(t, s.as_i8()) * h)
                })
                .collect::<Vec<_>>()
        };
        let mut expected = C64::new(0.0, 0.0);
        let mut crossed = false;
        for &(ta, fa) in &grid(&a, sa) {
            for &(tb, fb) in &grid(&b, sb) {
                let (first, second) = if ta < tb { ((ta, sa), (tb, sb)) } else { ((tb, sb), (ta, sa)) };
                crossed |= tb < ta;
                let pulses = [
                    PulseEvent::impulsive(first.0, 1.0, 1),
                    PulseEvent::impulsive(second.0, 1.0, 2),
                    c,
                ];
                let pattern = SignPattern::new(vec![first.1, second.1, sc]).unwrap();
                expected += fa
                    * fb
                    * polarization_impulsive(&pulses, 3.0, &pattern, &model, &noise, &g).unwrap();
            }
        }
        assert!(crossed);
        assert!(expected.norm() > 1e-3);
        assert!((got - expected).norm() < 1e-10 * expected.norm(), "{got} vs {expected}");
    }
}
