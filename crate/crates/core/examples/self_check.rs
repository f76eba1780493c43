//! Run every acceptance check and print one line per check.

fn main() {
    let outcomes = relplasma::validation::run_all();
    for o in &outcomes {
        println!("{o}");
    }
    println!(
        "{}/{} passed",
        outcomes.iter().filter(|o| o.passed).count(),
        outcomes.len()
    );
}
