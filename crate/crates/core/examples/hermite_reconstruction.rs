//! Expand one beat in Hermite bases of growing order and report the fit.
//!
//! Pass a path to also write `t,original,reconstructed` at the default order.

use ecg_ident::beats::{segment_lead, WindowSpec};
use ecg_ident::hermite::build_basis;
use ecg_ident::synth::{generate_cohort, CohortSpec};

fn main() -> ecg_ident::Result<()> {
    let cohort = CohortSpec { subjects: 2, duration_s: 10.0, ..CohortSpec::default() };
    let (record, annotations) = &generate_cohort(&cohort)?[0];
    let lead = record.lead(0, annotations)?;
    let (beats, _) = segment_lead(&lead, &WindowSpec::default())?;
    let beat = &beats.iter().find(|b| !b.truncated).expect("an interior beat").hermite_window;

    for order in [5, 10, 20, 40, 60] {
        let basis = build_basis(order, 10.0, 100)?;
        let fit = basis.fit(beat)?;
        let energy: f64 = fit.coefficients.iter().map(|c| c * c).sum();
        println!("L = {order:>3}: NRMSE {:.4}, coefficient energy {energy:.4}", fit.residual_nrmse);
    }

    let basis = build_basis(60, 10.0, 100)?;
    let fit = basis.fit(beat)?;
    let first: Vec<String> = fit.coefficients[..8].iter().map(|c| format!("{c:+.3}")).collect();
    println!("c0..c7 = [{}]", first.join(", "));

    if let Some(path) = std::env::args().nth(1) {
        let rec = basis.reconstruct(&fit.coefficients)?;
        let mut csv = String::from("t,original,reconstructed\n");
        for (k, (a, r)) in beat.iter().zip(&rec).enumerate() {
            csv.push_str(&format!("{},{a},{r}\n", k as i64 - 100));
        }
        std::fs::write(&path, csv).map_err(|e| ecg_ident::Error::Io { path: path.into(), source: e })?;
    }
    Ok(())
}
