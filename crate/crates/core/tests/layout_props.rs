mod common;

use proptest::prelude::*;

use chatcrowd::agents::{designer_lexicon, next_instruction, respond, TemplateCatalog};
use chatcrowd::dialog::DialogAct;
use chatcrowd::layout::{
    apply_edit, coco_similarity, diff_canvases, exact_match, BBox, Cell, CocoObject, Color, EditOp, Layout, Scenario,
    Shape, ShapeObject,
};
use common::*;

fn shape_layout(max: usize) -> impl Strategy<Value = Layout> {
    proptest::sample::subsequence((0..25usize).collect::<Vec<_>>(), 0..=max)
        .prop_flat_map(|cells| {
            let n = cells.len();
            (Just(cells), proptest::collection::vec((0..3usize, 0..3usize), n))
        })
        .prop_map(|(cells, attrs)| {
            let objects = cells
                .into_iter()
                .zip(attrs)
                .map(|(i, (s, c))| ShapeObject::new(Shape::ALL[s], Color::ALL[c], Cell::from_index(i)))
                .collect();
            Layout::shape2d(Scenario::ShapeRandom, objects).unwrap()
        })
}

fn box_layout() -> impl Strategy<Value = Layout> {
    proptest::collection::btree_map(1u32..12, (0..4usize, 0.0..0.7f64, 0.0..0.7f64, 0.05..0.3f64, 0.05..0.3f64), 0..6).prop_map(|m| {
        let labels = ["dog", "cat", "person", "car"];
        let objects = m
            .into_iter()
            .map(|(id, (l, x, y, w, h))| CocoObject::new(id, labels[l], BBox::new(x, y, w, h)))
            .collect();
        Layout::coco(Scenario::CocoSimple, objects).unwrap()
    })
}

fn shape_edit() -> impl Strategy<Value = EditOp> {
    let cell = (0..25usize).prop_map(Cell::from_index);
    prop_oneof![
        (cell.clone(), 0..3usize, 0..3usize).prop_map(|(c, s, k)| EditOp::add_shape(ShapeObject::new(Shape::ALL[s], Color::ALL[k], c))),
        cell.clone().prop_map(EditOp::remove_cell),
        (cell.clone(), cell).prop_map(|(a, b)| EditOp::move_cell(a, b)),
    ]
}

fn fold(canvas: &Layout, edits: &[EditOp]) -> Layout {
    edits.iter().fold(canvas.clone(), |c, e| apply_edit(&c, e).unwrap().layout)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn diff_then_apply_reproduces_target(prev in shape_layout(12), next in shape_layout(12)) {
        let ops = diff_canvases(&prev, &next);
        prop_assert_eq!(fold(&prev, &ops), next.clone());
        prop_assert_eq!(oracle_apply(&prev, &ops), grid_of(&next));
        // never more operations than objects that differ
        let (p, n) = (triples(&prev), triples(&next));
        prop_assert!(ops.len() <= p.difference(&n).count() + n.difference(&p).count());
    }

    #[test]
    fn box_diff_then_apply_reproduces_target(prev in box_layout(), next in box_layout()) {
        let ops = diff_canvases(&prev, &next);
        prop_assert_eq!(fold(&prev, &ops), next);
    }

    #[test]
    fn apply_agrees_with_oracle(start in shape_layout(8), edits in proptest::collection::vec(shape_edit(), 0..12)) {
        prop_assert_eq!(grid_of(&fold(&start, &edits)), oracle_apply(&start, &edits));
    }

    #[test]
    fn apply_leaves_input_untouched(start in shape_layout(8), edit in shape_edit()) {
        let before = start.clone();
        let _ = apply_edit(&start, &edit).unwrap();
        prop_assert_eq!(start, before);
    }

    #[test]
    fn exact_match_is_triple_set_equality(a in shape_layout(6), b in shape_layout(6)) {
        prop_assert_eq!(exact_match(&a, &b).unwrap(), triples(&a) == triples(&b));
        prop_assert_eq!(exact_match(&a, &b).unwrap(), exact_match(&b, &a).unwrap());
        prop_assert!(exact_match(&a, &a).unwrap());
    }

    #[test]
    fn similarity_is_bounded_and_symmetric(a in box_layout(), b in box_layout()) {
        let s = coco_similarity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&s));
        prop_assert!((s - coco_similarity(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!((coco_similarity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    /// Each template instruction, executed by the designer, performs exactly
    /// its gold edits and brings the canvas strictly closer to the reference.
    #[test]
    fn instructions_make_progress(reference in shape_layout(7), canvas in shape_layout(7), seed in any::<u64>()) {
        prop_assume!(triples(&reference) != triples(&canvas));
        let ins = next_instruction(&reference, &canvas, seed, &TemplateCatalog::default()).unwrap();
        let gold = fold(&canvas, &ins.gold_edits);
        prop_assert!(symmetric_difference(&gold, &reference) < symmetric_difference(&canvas, &reference));
        let mv = respond(&ins.utterance, &canvas, seed, &designer_lexicon());
        prop_assert_eq!(mv.act, DialogAct::Edit, "{}", ins.utterance);
        prop_assert_eq!(mv.canvas, gold);
    }
}
