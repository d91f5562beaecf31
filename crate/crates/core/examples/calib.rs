//! Throwaway calibration probe: uniform-plan aim margins for a phantom spec.
//!
//! Usage: calib [preset] [key=a,b,c ...] [n_dc=N]
//! Keys: ctv_hr_semi, ctv_ir_semi, gtv_semi, rv_point (3-vectors).

use dwellopt_core::dvi::Direction;
use dwellopt_core::evaluator::{EvalScratch, Evaluator, EvaluatorConfig};
use dwellopt_core::objective::{ConstraintConfig, ObjectiveMode};
use dwellopt_core::phantom::{generate_phantom, PhantomSpec};
use dwellopt_core::protocol::{default_protocol, AimTier};

fn main() {
    let mut preset = "easy".to_string();
    let mut spec_overrides: Vec<(String, [f64; 3])> = Vec::new();
    let mut scalar_overrides: Vec<(String, f64)> = Vec::new();
    let mut n_dc = 20000usize;
    for arg in std::env::args().skip(1) {
        if let Some((k, v)) = arg.split_once('=') {
            if k == "n_dc" {
                n_dc = v.parse().unwrap();
            } else if k == "save" {
                save = Some(v.to_string());
            } else if v.contains(',') {
                let parts: Vec<f64> = v.split(',').map(|x| x.parse().unwrap()).collect();
                spec_overrides.push((k.to_string(), [parts[0], parts[1], parts[2]]));
            } else {
                scalar_overrides.push((k.to_string(), v.parse().unwrap()));
            }
        } else {
            preset = arg;
        }
    }

    let mut spec = match preset.as_str() {
        "easy" => PhantomSpec::easy(),
        "medium" => PhantomSpec::medium(),
        "hard" => PhantomSpec::hard(),
        other => panic!("unknown preset {other}"),
    };
    for (k, v) in &spec_overrides {
        match k.as_str() {
            "ctv_hr_semi" => spec.ctv_hr_semi_axes = *v,
            "ctv_ir_semi" => spec.ctv_ir_semi_axes = *v,
            "gtv_semi" => spec.gtv_semi_axes = *v,
            "ctv_hr_center" => spec.ctv_hr_center = *v,
            "gtv_center" => spec.gtv_center = *v,
            "rv_point" => spec.rectovaginal_point = *v,
            other => panic!("unknown key {other}"),
        }
    }
    for (k, v) in &scalar_overrides {
        match k.as_str() {
            "needle_count" => spec.needle_count = *v as usize,
            "needle_dwells" => spec.needle_dwells = *v as usize,
            "needle_ring" => spec.needle_ring_radius_mm = *v,
            "needle_start" => spec.needle_start_mm = *v,
            "needle_step" => spec.needle_step_mm = *v,
            "tandem_dwells" => spec.tandem_dwells = *v as usize,
            other => panic!("unknown scalar {other}"),
        }
    }

    let case = generate_phantom(&spec, 1).expect("phantom");
    for roi in &case.rois {
        println!("roi {:<16} vol {:>8.3} cm3", format!("{:?}", roi.name), roi.volume_cm3);
    }

    let protocol = default_protocol();
    let config = EvaluatorConfig {
        kernel: Default::default(),
        constraint: ConstraintConfig::default(),
        n_dc,
        dc_seed: 777,
    };
    let evaluator =
        Evaluator::new(&case, &protocol, ObjectiveMode::Full, config).expect("evaluator");
    let mut scratch = EvalScratch::default();

    let n = case.n_dwells();
    let base = evaluator.evaluate(&vec![1.0f64; n], &mut scratch).expect("eval");
    let meas_idx = |slug: &str| {
        evaluator
            .measurements()
            .iter()
            .position(|m| m.slug == slug)
            .unwrap_or_else(|| panic!("missing measurement {slug}"))
    };

    let d90_1 = base.dvi_values[meas_idx("d90_ctv_hr")];
    let s_mid = 115.0 / d90_1;
    let sol = evaluator.evaluate(&vec![s_mid; n], &mut scratch).expect("eval");

    println!("\nuniform t = {s_mid:.4} s  (D90 ctv_hr = 115)");
    println!(
        "{:<24} {:>9} {:>9} {:>9}  {:>8} {:>8}",
        "aim", "strict", "loose", "value", "s_lo", "s_hi"
    );
    let mut s_lo = f64::NEG_INFINITY;
    let mut s_hi = f64::INFINITY;
    for aimspec in &protocol.aims {
        let mi = meas_idx(&aimspec.dvi.slug());
        let value = sol.dvi_values[mi];
        let linear = base.dvi_values[mi] > 0.0
            && !matches!(aimspec.dvi.kind, dwellopt_core::dvi::DviKind::VDose { .. });
        let (lo, hi) = if linear {
            let v1 = base.dvi_values[mi];
            match aimspec.dvi.direction {
                Direction::Maximize => (aimspec.aspiration_strict / v1, f64::INFINITY),
                Direction::Minimize => (f64::NEG_INFINITY, aimspec.aspiration_strict / v1),
            }
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        };
        if aimspec.tier == AimTier::Embrace && linear {
            s_lo = s_lo.max(lo);
            s_hi = s_hi.min(hi);
        }
        let ok = match aimspec.dvi.direction {
            Direction::Maximize => value > aimspec.aspiration_strict,
            Direction::Minimize => value < aimspec.aspiration_strict,
        };
        println!(
            "{:<24} {:>9.2} {:>9.2} {:>9.3}  {:>8.3} {:>8.3}  {}",
            aimspec.id(),
            aimspec.aspiration_strict,
            aimspec.aspiration_loose,
            value,
            if lo.is_finite() { lo } else { f64::NAN },
            if hi.is_finite() { hi } else { f64::NAN },
            if ok { "ok" } else { "VIOLATED(strict)" }
        );
    }
    if s_lo <= s_hi {
        let margin = (s_hi - s_lo) / (s_hi + s_lo);
        println!(
            "\nembrace uniform-feasible scale [{:.4}, {:.4}]  rel half-width {:.3}%",
            s_lo,
            s_hi,
            100.0 * margin
        );
    } else {
        println!("\nembrace NOT uniform-satisfiable: s_lo {s_lo:.4} > s_hi {s_hi:.4}");
    }
}
