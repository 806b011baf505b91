//! The step-level metrics on small hand-made call sequences, including a
//! case where a single greedy scan under-counts ordered matches.

use skilltree::metrics::{
    efficiency, extract_answer, tool_any_order, tool_exact_match, tool_in_order,
    tool_in_order_with, InOrderMode,
};

fn main() {
    let cases: [(&[&str], &[&str]); 4] = [
        (
            &["get_filelist", "ATI", "ATI", "mean"],
            &["get_filelist", "ATI", "mean"],
        ),
        (&["mean", "ATI"], &["ATI", "mean"]),
        (
            &["ATI", "band_ratio", "mean"],
            &["ATI", "split_window", "mean"],
        ),
        (&["B", "C", "A"], &["A", "B", "C"]),
    ];
    for (pred, gt) in cases {
        println!("pred {pred:?}\n  gt {gt:?}");
        println!(
            "  any-order {:.3}  in-order {:.3} (greedy scan {:.3})  exact {:.3}  efficiency {:.2}\n",
            tool_any_order(pred, gt),
            tool_in_order(pred, gt),
            tool_in_order_with(pred, gt, InOrderMode::Greedy),
            tool_exact_match(pred, gt),
            efficiency(pred.len(), gt.len()).unwrap()
        );
    }
    for text in [
        "so the answer is <Answer>D<Answer>",
        "maybe A. <Answer>B</Answer>",
        "no idea",
    ] {
        println!("{text:?} -> {:?}", extract_answer(text));
    }
}
