//! Matrix measures relative to a scalar reference: trace measure, trace densities, and the split
//! into a part carried by the reference support and a singular remainder.
//!
//! Run with `cargo run --example measure_decomposition`.

use bjweyl::blockcore::matrix::{Mat, C64};
use bjweyl::measure::{
    decompose_vs_reference, density_integral, is_minimal_support, DiscreteMatrixMeasure, DiscreteScalarMeasure,
};

fn psd(a: f64, b: f64, c: f64) -> Mat {
    let g = Mat::from_row_slice(2, 2, &[C64::new(a, 0.0), C64::new(b, c), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    &g * g.adjoint()
}

fn main() -> bjweyl::Result<()> {
    let support: Vec<f64> = (0..5).map(|k| k as f64 * 0.5).collect();
    let nu = DiscreteScalarMeasure::new(support.iter().map(|l| (*l, 0.2)).collect())?;
    let densities: Vec<Mat> = (0..5).map(|k| psd(1.0 + k as f64, 0.3, -0.1 * k as f64)).collect();
    let ac = density_integral(&nu, &densities)?;
    let sing = DiscreteMatrixMeasure::new(2, vec![(5.0, psd(0.5, 0.0, 0.0)), (6.0, psd(0.1, 1.0, 0.0))])?;
    let m = ac.plus(&sing)?;

    let dec = decompose_vs_reference(&m, &nu);
    println!("total mass\n{:.4}", m.total());
    println!("reference-carried part: {} atoms, trace {:.4}", dec.ac.atoms().len(), dec.ac.trace_measure().total());
    println!("singular part: {} atoms at {:?}", dec.sing.atoms().len(), dec.sing.support());
    println!(
        "reference support is minimal for the carried trace part: {}",
        is_minimal_support(&dec.ac.trace_measure(), &support, &nu)
    );
    Ok(())
}
