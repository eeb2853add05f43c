mod common;

use common::{stage, ANNULI};
use uniformize_core::rectnet::{build_rectnet, verify_orthogonal_filling};

#[test]
fn wheel_net_shape() {
    let s = stage("wheel");
    let net = build_rectnet(&s.quad, &s.quad.field, &s.h).unwrap();
    assert_eq!(net.shape(), (2, 5));
    assert_eq!(net.cell_count(), 4);
    assert!(verify_orthogonal_filling(&net).passed());
}

#[test]
fn nets_fill_orthogonally_and_cover_area() {
    for name in ANNULI {
        let s = stage(name);
        let net = build_rectnet(&s.quad, &s.quad.field, &s.h).unwrap();
        let report = verify_orthogonal_filling(&net);
        assert!(report.passed(), "{name}: {:?} {:?}", &report.violations[..report.violations.len().min(4)], report.defects);
        let area: f64 = net.cells().map(|c| net.cell_area(c).unwrap()).sum();
        let expect = s.quad.complex.area();
        assert!((area - expect).abs() <= 1e-9 * expect, "{name}: {area} vs {expect}");
        println!("{name}: shape {:?}", net.shape());
    }
}
