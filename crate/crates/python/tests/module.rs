use std::ffi::CStr;

use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::wrap_pymodule;

fn run(code: &CStr) {
    Python::attach(|py| {
        let globals = PyDict::new(py);
        globals.set_item("cantor", wrap_pymodule!(cantor::cantor)(py)).unwrap();
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.display(py);
            panic!("python code failed: {e}");
        }
    });
}

#[test]
fn cylinders_and_ratios() {
    run(c"
s = cantor.BranchSystem.power_example(3, 2, 0.5)
a, b, log_len = s.cylinder('21')
assert 0 < a < b < 1
r = s.ratio_geometry('21')
assert len(r) == 5 and abs(sum(r) - 1) < 1e-12
assert s.log_length_residual('1' * 16 + '3') < 1e-9
assert s.regroup(2).d == 9
");
}

#[test]
fn realized_tree_matches_prescribed_ratios() {
    run(c"
flat = cantor.PrescribedScaling.constant([0.3, 0.4, 0.3])
tree = cantor.realize(flat, '(12)', 5)
assert len(tree) == 2 ** 6 - 1
assert max(abs(x - y) for x, y in zip(tree.node_ratio('121'), [0.3, 0.4, 0.3])) < 1e-12
assert tree.to_text().splitlines()[0].split('\t')[0] == ''
");
}

#[test]
fn library_errors_become_cantor_errors() {
    run(c"
for bad in [lambda: cantor.BranchSystem.affine(2, [0.5, 0.6, 0.1]),
            lambda: cantor.PrescribedScaling.holder_series(3, 0.1, 0.5, 1.0),
            lambda: cantor.realize(cantor.PrescribedScaling.constant([0.5, 0.5]), '(1)', 2)]:
    try:
        bad()
    except cantor.CantorError:
        continue
    raise AssertionError('accepted')
assert issubclass(cantor.CantorError, ValueError)
");
}

#[test]
fn same_tail_conjugacy_is_exact() {
    run(c"
s = cantor.BranchSystem.power_example(2, 1, 0.5)
t = cantor.realize(s, '(2)', 5)
assert cantor.conjugacy_smoothness(t, t, 1)['exact']
");
}
