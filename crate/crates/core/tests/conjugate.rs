mod common;

use common::{stage, ANNULI};
use uniformize_core::conjugate::{conjugate_of_h, verify_level_topology, width};

#[test]
fn wheel_period_and_inner_values() {
    let s = stage("wheel");
    assert!((s.period - 4.0).abs() < 1e-12, "period {}", s.period);
    let inner: Vec<f64> = s.quad.inner.iter().map(|&v| s.gstar.values[v]).collect();
    for (got, want) in inner.iter().zip([0.0, 1.0, 2.0, 3.0, 4.0]) {
        assert!((got - want).abs() < 1e-12, "{inner:?}");
    }
}

#[test]
fn topology_on_annuli() {
    for name in ANNULI {
        let s = stage(name);
        let report = verify_level_topology(&s.quad, &s.quad.field, &s.gstar);
        assert!(report.passed(), "{name} g*: {:?}", &report.violations[..report.violations.len().min(5)]);
        let hstar = conjugate_of_h(&s.quad, &s.h).unwrap();
        let w = width(&hstar).unwrap();
        assert!(w > 0.0);
        let report = verify_level_topology(&s.quad, &s.h, &hstar);
        assert!(report.passed(), "{name} h*: {:?}", &report.violations[..report.violations.len().min(5)]);
        println!("{name}: period {} width {w} vertices {}", s.period, s.quad.complex.vertex_count());
    }
}
