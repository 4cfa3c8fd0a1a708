use std::collections::BTreeSet;

use manin_d4::torsor::{
    brute_force_count, torsor_points, torsor_to_point, write_points_csv, write_torsor_csv, SurfacePoint,
};

const POINTS_B12: &str = include_str!("golden/points_b12.csv");
const TORSOR_B12: &str = include_str!("golden/torsor_b12.csv");

fn csv_rows(text: &str) -> Vec<Vec<i128>> {
    text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn direct_points_match_golden_file() {
    let points = brute_force_count(12, false, true).unwrap().points.unwrap();
    let mut out = Vec::new();
    write_points_csv(&points, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), POINTS_B12);
}

#[test]
fn torsor_points_match_golden_file() {
    let mut out = Vec::new();
    write_torsor_csv(&torsor_points(12).unwrap(), &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), TORSOR_B12);
}

#[test]
fn golden_torsor_rows_map_onto_golden_points() {
    let points: BTreeSet<[i128; 4]> = csv_rows(POINTS_B12).into_iter().map(|r| [r[0], r[1], r[2], r[3]]).collect();
    let torsor = torsor_points(12).unwrap();
    let images: BTreeSet<[i128; 4]> = torsor.iter().map(|t| torsor_to_point(t).unwrap().x).collect();
    assert_eq!(images.len(), torsor.len());
    assert_eq!(images, points);
    for row in csv_rows(TORSOR_B12) {
        assert_eq!(row.len(), 10);
        assert!(row[..7].iter().all(|&e| e > 0));
    }
}

#[test]
fn golden_points_are_canonical() {
    for r in csv_rows(POINTS_B12) {
        let p = SurfacePoint::new([r[0], r[1], r[2], r[3]]).unwrap();
        assert_eq!(p.x.to_vec(), r);
        assert!(p.in_open_subset() && p.height() <= 12);
    }
}
