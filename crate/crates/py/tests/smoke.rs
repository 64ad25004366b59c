use std::ffi::CString;

use pyo3::prelude::*;
use lu_orbits_py::lu_orbits_py;
use pyo3::types::PyDict;

#[test]
fn python_smoke_script_runs_against_the_module() {
    pyo3::append_to_inittab!(lu_orbits_py);
    Python::initialize();
    Python::attach(|py| {
        let globals = PyDict::new(py);
        globals.set_item("__name__", "smoke_test").unwrap();
        let script = CString::new(include_str!("../python/smoke_test.py")).unwrap();
        let result = py.run(&script, Some(&globals), None).and_then(|_| {
            globals
                .get_item("main")?
                .expect("script defines main")
                .call0()
                .map(|_| ())
        });
        if let Err(e) = result {
            e.print(py);
            panic!("smoke script failed");
        }
    });
}
