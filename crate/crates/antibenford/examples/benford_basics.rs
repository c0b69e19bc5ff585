//! First digits and the Benford distribution: extract leading digits, build
//! a histogram, and judge it with the chi-square statistic.

use antibenford::benford::{
    chi_square, first_digit, first_digit_of_str, BenfordModel, Digit, DigitHistogram,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let model = BenfordModel::standard();

    println!("Benford pmf, P(d) = log10(1 + 1/d):");
    for d in Digit::all() {
        let p = model.probability(d);
        println!("  {d}: {p:.5} {}", "#".repeat((p * 120.0).round() as usize));
    }

    println!("\nfirst digits:");
    for a in [9667.0, 2160.0, 0.052, 1.0e6, 45.5] {
        println!("  {a:>9} -> {}", first_digit(a).unwrap());
    }
    // The string path reads the literal itself, so no value is rounded
    // through a float on the way.
    println!("  \"00100.7\" -> {}", first_digit_of_str("00100.7").unwrap());

    // A thousand faithful samples land near the 8 expected under the null;
    // a thousand nines explode.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let faithful: DigitHistogram = (0..1000).map(|_| model.sample_digit(&mut rng)).collect();
    let nines = DigitHistogram::from_counts([0, 0, 0, 0, 0, 0, 0, 0, 1000]);
    println!(
        "\nchi-square of 1000 Benford samples: {:9.2}",
        chi_square(&faithful, &model).statistic
    );
    println!(
        "chi-square of 1000 nines:           {:9.2}",
        chi_square(&nines, &model).statistic
    );
}
