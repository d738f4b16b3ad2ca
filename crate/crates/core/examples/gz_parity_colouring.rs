//! Colour rational unit vectors by parity and check every triad up to a bound.

use ncsim::gz::{enumerate_rational_triads, gz_colour, parse_rational, reduce, verify};

fn main() -> ncsim::Result<()> {
    for raw in [["3/5", "4/5", "0"], ["2/3", "-1/3", "2/3"], ["12", "0", "-5"]] {
        let parsed = [parse_rational(raw[0])?, parse_rational(raw[1])?, parse_rational(raw[2])?];
        let v = reduce(&parsed)?;
        println!("{raw:?} -> {v}  colour {}", gz_colour(&v));
    }

    let triads = enumerate_rational_triads(7);
    println!("\n{} orthogonal triads with components up to 7, first few:", triads.len());
    for t in triads.iter().take(5) {
        let colours: Vec<u8> = t.iter().map(gz_colour).collect();
        println!("  {} {} {}  colours {colours:?}", t[0], t[1], t[2]);
    }

    let report = verify(50);
    println!(
        "\nmax component 50: {} vectors, {} triads, {} violations",
        report.vectors, report.triads, report.violations
    );
    Ok(())
}
