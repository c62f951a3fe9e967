use arithsupport::exact::{DiffVar, Ring};
use arithsupport::opalg::NormalOp;
use arithsupport::oplang::{elaborate, elaborate_diff, parse, print, Dialect};

const DIFF: &[&str] = &[
    "theta",
    "theta^2",
    "theta*(theta + 1)",
    "x",
    "dx",
    "dx*x",
    "x*dx",
    "dx^2",
    "x^(-1)",
    "x + x^(-1) + theta^2",
    "theta + 3*t",
    "theta - t*x",
    "theta^2 + t*(x + x^(-1))",
    "t*3",
    "(theta - 1/2)*(theta + 1/3)",
    "-theta + 7/5",
    "x^2*dx^2 - x*dx",
    "t^(1/2)*x + t",
    "u*x + u^2",
    "(x*dx)^3 - theta^3",
    "(theta + 1)^3",
    "2*x^3 - 5*x^(-2)",
    "(1 + x)*(1 - x)",
    "theta*x - x*theta",
    "-(theta + x)",
    "t^2*dx - t*x*theta",
    "((theta))",
    "0",
    "1/7",
    "theta^0",
];

const QDIFF: &[&str] = &[
    "y",
    "(y - 1)*(y - q)",
    "y - 1 + t*x",
    "y^(-1)",
    "q^(-1)*y + q",
    "y*x - q*x*y",
    "(y - 1)^2 + t*x^(-1)",
    "x^2*y",
    "u*x + (y - q^2)",
    "-y^2 + 3/2",
];

const TORUS: &[&str] = &[
    "x + y + x^(-1)*y^(-1)",
    "x + y + a*x^(-1) + b*y^(-1) - lambda",
    "y*x - q*x*y",
    "lambda*x^2",
    "q^2*x*y^(-1) + 1/3",
    "(x + y)^2",
    "x^(-1) - lambda",
    "a*b*x*y",
    "-x + q^(-1)*y",
    "y^3",
];

fn corpus() -> impl Iterator<Item = (Dialect, &'static str)> {
    DIFF.iter().map(|s| (Dialect::Diff, *s))
        .chain(QDIFF.iter().map(|s| (Dialect::QDiff, *s)))
        .chain(TORUS.iter().map(|s| (Dialect::Torus, *s)))
}

#[test]
fn corpus_has_fifty_entries() {
    assert_eq!(corpus().count(), 50);
}

#[test]
fn print_parse_roundtrip() {
    for (d, s) in corpus() {
        let e = parse(s, d, 2).unwrap_or_else(|err| panic!("{s}: {err}"));
        let printed = print(&e);
        assert_eq!(parse(&printed, d, 2).unwrap(), e, "{s} -> {printed}");
        assert_eq!(print(&parse(&printed, d, 2).unwrap()), printed);
    }
}

#[test]
fn corpus_elaborates() {
    for (d, s) in corpus() {
        let e = parse(s, d, 2).unwrap();
        elaborate(&e, d, 2).unwrap_or_else(|err| panic!("{s}: {err}"));
    }
}

#[test]
fn weyl_relation_after_elaboration() {
    let el = |s: &str| elaborate_diff(&parse(s, Dialect::Diff, 1).unwrap(), 1).unwrap();
    assert!(el("dx*x").sub(&el("x*dx")).is_one());
    assert!(el("dx*x - x*dx").is_one());
    assert!(el("theta*x - x*theta").sub(&el("x")).is_zero());
    assert_eq!(el("x*dx").coeff(0), NormalOp::<DiffVar>::symbol());
}

#[test]
fn malformed_inputs_report_position() {
    for (s, d) in [("theta +", Dialect::Diff), ("y*", Dialect::QDiff), ("theta", Dialect::QDiff), ("x y", Dialect::Diff), ("theta^(-1)", Dialect::Diff)] {
        let err = parse(s, d, 1).unwrap_err();
        assert!(!err.to_string().is_empty(), "{s}");
    }
    assert!(parse("theta + (x", Dialect::Diff, 1).unwrap_err().to_string().contains("offset 10"));
}
