use modlie::chevalley::Convention;
use modlie::scenario::{load_appendix, run_all};

fn main() {
    let file = load_appendix().unwrap();
    let t0 = std::time::Instant::now();
    let reports = run_all(&file, Convention::Sage, true).unwrap();
    for r in &reports {
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!("{}: {status} ({} checks)", r.id, r.checks.len());
        for c in &r.checks {
            if !c.pass {
                println!("    {}: expected {}, got {}", c.name, c.expected, c.actual);
            }
        }
        if !r.computed.as_object().unwrap().is_empty() {
            println!("    computed: {}", serde_json::to_string(&r.computed).unwrap());
        }
    }
    println!("total {:?}", t0.elapsed());
}
