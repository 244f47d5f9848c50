use modlie::chevalley::{build_structure_constants, reduce_mod_p, Convention};
use modlie::linform::{centralizer, element_centralizer, regular_nilpotent_element, LinearForm};
use modlie::rootsystem::{parse_type, RootSystem};

fn main() {
    let rows = [
        ("E6", 2u8), ("E6", 3), ("E7", 2), ("E7", 3), ("E8", 2), ("E8", 3), ("E8", 5),
        ("F4", 2), ("F4", 3), ("G2", 2), ("G2", 3),
    ];
    let t0 = std::time::Instant::now();
    for (t, p) in rows {
        let (label, rank) = parse_type(t).unwrap();
        let rs = RootSystem::of(label, rank).unwrap();
        let sc = build_structure_constants(rs, Convention::Sage);
        let alg = reduce_mod_p(&sc, p).unwrap();
        let e = regular_nilpotent_element(&alg);
        let ce = element_centralizer(&alg, &e).dim;
        let chi = LinearForm::regular_nilpotent(&alg);
        let cchi = centralizer(&alg, &chi).dim;
        println!("{t} p={p}: dim c_g(e) = {ce}, dim c_g(chi) = {cchi}, center = {}", alg.center().len());
    }
    println!("total {:?}", t0.elapsed());
}
