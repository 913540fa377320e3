//! Workloads shared by the criterion benches: families of terms whose
//! state spaces grow with a size parameter.

use ctc_core::equiv::{check_step_bisim, Mode, Strength};
use ctc_core::laws::{expansion_nf, law_model};
use ctc_core::{build_plts, parse_process, Bounds, Definitions, Plts, Process, StateModel};

/// `a1.b1.nil || ... || an.bn.nil`, built as text so the parser is exercised too.
pub fn parallel_chains(n: usize) -> Process {
    let parts: Vec<String> = (0..n).map(|i| format!("a{i}.b{i}.nil")).collect();
    parse_process(&parts.join(" || "), &Definitions::new()).expect("well-formed")
}

/// `n` nested fair coins, each leading to a distinct action; `n + 1` outcomes.
pub fn coin_tower(n: usize) -> Process {
    let mut text = String::from("d.nil");
    for i in 0..n {
        text = format!("(c{i}.nil [+1/2] ({text}))");
    }
    parse_process(&text, &Definitions::new()).expect("well-formed")
}

pub fn build(p: &Process, model: &StateModel) -> Plts {
    build_plts(p, model.initial(), model, &Definitions::new(), Bounds::default()).unwrap_or_else(|e| panic!("{e}"))
}

/// Checks a parallel composition against its own expansion, forward only.
pub fn expansion_roundtrip(n: usize) -> bool {
    let model = StateModel::trivial();
    let p = parallel_chains(n);
    let nf = expansion_nf(&p, &model, &Definitions::new(), Bounds::default()).expect("expandable");
    let (a, b) = (build(&p, &model), build(&nf, &model));
    check_step_bisim(&a, &b, Mode::Forward, Strength::Strong).expect("comparable").equivalent
}

/// A guarded system over the law model, for the state-aware paths.
pub fn guarded_toggles(n: usize) -> (Process, StateModel) {
    let parts: Vec<String> = (0..n).map(|i| if i % 2 == 0 { "<!p>.a.nil".to_string() } else { "b.<q>.nil".to_string() }).collect();
    let p = parse_process(&parts.join(" || "), &Definitions::new()).expect("well-formed");
    (p, law_model())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_build() {
        let m = StateModel::trivial();
        assert!(build(&parallel_chains(2), &m).len() > 5);
        assert!(build(&coin_tower(3), &m).prob[0].len() == 4);
        assert!(expansion_roundtrip(2));
        let (p, lm) = guarded_toggles(2);
        assert!(build(&p, &lm).len() > 1);
    }
}
