use quatforms_core::character::DirichletCharacter;
use quatforms_core::forms::FormSpace;
use quatforms_core::order::{LClass, SpecialOrder};
use quatforms_core::ring::ZpM;

#[test]
fn weight_six_level_three_eigenvalues() {
    let order = SpecialOrder::build(3, 1, 1, LClass::Unramified).unwrap();
    let triv = DirichletCharacter::trivial(1).unwrap();
    let sp = FormSpace::new(&order, &triv, 6, 5, ZpM::new(0, 5, 8)).unwrap();
    println!("h = {}, dim = {}", sp.classes.h(), sp.dim());
    assert_eq!(sp.dim(), 1);
    let modulus: i64 = 5i64.pow(8);
    for q in [2u64, 5, 7] {
        let t = sp.hecke(q).unwrap();
        let v = t.at(0, 0).value() as i64;
        let centered = if v > modulus / 2 { v - modulus } else { v };
        println!("T_{q} = {centered} (raw {v})");
    }
}
