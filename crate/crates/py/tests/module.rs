use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &std::ffi::CStr) {
    Python::initialize();
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(gwalk::gwalk)(py);
        let globals = PyDict::new(py);
        globals.set_item("gwalk", module).unwrap();
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.display(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn special_values_through_the_module() {
    run(c"
import math
g = gwalk.Graph.complete(4, 2)
assert abs(gwalk.comfortability(g, 0.0) - 13 / 8) < 1e-12
assert abs(gwalk.comfortability(g, math.pi) - 5 / 12) < 1e-12
assert len(gwalk.stationary_state(g, 0.3, [1, 0.5j])) == 12
");
}

#[test]
fn errors_map_to_python_exceptions() {
    run(c"
try:
    gwalk.Graph(3, [(0, 1)], [0])
    raise AssertionError('accepted')
except ValueError:
    pass
try:
    gwalk.comfortability(gwalk.Graph.complete(4, 2), 0.0, [1])
    raise AssertionError('accepted')
except ValueError as e:
    assert 'inflow' in str(e)
");
}
