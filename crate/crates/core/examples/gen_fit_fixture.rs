//! Regenerates fixtures/synthetic.tsv: noiseless λ0(L) = 2 + 5 e^{-0.8 L} meV.

use xvspin::fitting::model;

fn main() {
    let mut text = String::from("# unit = meV\n# L\tlambda0\n");
    for k in 0..5 {
        let l = 1.0 + 0.5 * k as f64;
        text.push_str(&format!("{l}\t{}\n", model(l, 2.0, 5.0, 0.8)));
    }
    std::fs::write(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic.tsv"), text).unwrap();
}
