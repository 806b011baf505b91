//! Walk one question by hand under the Active paradigm: kit table, catalog,
//! document, call.

use skilltree::bundled;
use skilltree::engine::{init_state, Action, Paradigm};
use skilltree::environment::MockEnvironment;

fn show(label: &str, text: &str) {
    let head: String = text.lines().take(6).collect::<Vec<_>>().join("\n    ");
    println!("{label}\n    {head}\n");
}

fn main() {
    let tree = bundled::reference_tree();
    let fixture = bundled::fixture_a1();
    let mut env = MockEnvironment::new(&fixture);
    let mut state = init_state(fixture.prompt_text(), &tree, Paradigm::Active, None).unwrap();
    show("o_0 (kit table):", state.initial_context());

    let premature = Action::call(
        "inversion.split_window",
        fixture.gt_trajectory[1].args.clone(),
    );
    match state.step_with(premature, &mut env, &tree) {
        Ok(_) => unreachable!(),
        Err(e) => println!("call before doc -> {e}\n"),
    }

    let script = [
        Action::filelist("question33/"),
        Action::skill("inversion"),
        Action::doc("inversion.split_window"),
        Action::call(
            "inversion.split_window",
            fixture.gt_trajectory[1].args.clone(),
        ),
    ];
    for action in script {
        let label = format!("{} ->", action.kind());
        let obs = state.step_with(action, &mut env, &tree).unwrap();
        show(&format!("{label} {:?}", obs.kind), &obs.payload);
        println!("    callable: {:?}\n", state.callable());
    }
}
