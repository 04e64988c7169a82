//! Constants computed independently by `fixtures/oracle.py` (arbitrary
//! precision) and frozen here.

#![allow(clippy::excessive_precision)]

use banditclust::bounds::{complexity_h, lower_bound_quantile};
use banditclust::classify::{labeling_threshold, tilde_l_max};
use banditclust::csh::{lemma1_budget, lemma1_halving_steps};
use banditclust::detect::{l_max, stopping_threshold};
use banditclust::env::{balanced_labels, labels_with_ones, ProblemInstance};

const STOP_THRESHOLD_DELTA_005: [f64; 20] = [
    6.2564221458848969,
    10.562040560512695,
    16.187589443218976,
    24.068881608316802,
    35.274767858272267,
    51.270278432321328,
    74.121915418249789,
    106.7629389286511,
    153.36332426117592,
    219.85287915622245,
    314.66318489049873,
    449.7806388148101,
    642.24120425308796,
    916.25201176865758,
    1306.20235763638,
    1860.9364192376207,
    2649.8156535990499,
    3771.3195063490754,
    5365.2458640403677,
    7630.0160794505005,
];

const STOP_THRESHOLD_DELTA_05: [f64; 20] = [
    4.5521574361577844,
    8.643803521252123,
    13.724260599624483,
    20.783301372100437,
    30.815229279558514,
    45.157277007380304,
    65.689685473879569,
    95.081428225794875,
    137.12991999555307,
    197.24071570641022,
    283.10800561556885,
    405.68099399533646,
    580.53652435762192,
    829.8286162911318,
    1185.0570306048237,
    1690.9983707346103,
    2411.2870556661017,
    3436.3374910648269,
    4894.5880570952672,
    6968.4577566910663,
];

fn assert_rel(actual: f64, expected: f64, tol: f64) {
    assert!(
        ((actual - expected) / expected).abs() <= tol,
        "actual {actual} vs expected {expected}"
    );
}

#[test]
fn stopping_thresholds_match_oracle() {
    for (k, (&a, &b)) in STOP_THRESHOLD_DELTA_005
        .iter()
        .zip(&STOP_THRESHOLD_DELTA_05)
        .enumerate()
    {
        let k = k as u32 + 1;
        assert_rel(stopping_threshold(k, 0.05), a, 1e-12);
        assert_rel(stopping_threshold(k, 0.5), b, 1e-12);
    }
}

#[test]
fn labeling_thresholds_match_oracle() {
    assert_rel(labeling_threshold(1, 2, 10, 0.25), 6.5982775951146082, 1e-12);
    assert_rel(labeling_threshold(51, 20, 10, 0.4), 50.933753513131324, 1e-12);
    assert_rel(labeling_threshold(1000, 100, 20, 0.05), 271.92071833598805, 1e-12);
}

#[test]
fn round_limits_match_oracle() {
    assert_eq!(l_max(20, 1000, 0.4).unwrap(), 21);
    assert_eq!(l_max(2, 1, 0.5).unwrap(), 7);
    assert_eq!(tilde_l_max(1000, 0.4).unwrap(), 17);
}

#[test]
fn single_search_parameters_match_oracle() {
    let steps = lemma1_halving_steps(64, 1.0, 1, 1, 0.1).unwrap();
    assert_eq!(steps, 13);
    assert_eq!(lemma1_budget(steps, 2.0).unwrap(), 2_321_719_296);
    assert_eq!(lemma1_budget(1, 1.0).unwrap(), 1032);
}

#[test]
fn lower_bound_matches_oracle() {
    let mut gaps = vec![0.0; 1000];
    gaps[0] = 15.0;
    let features_term = 9.081344422506501;
    assert_rel(lower_bound_quantile(&gaps, 0.5, 20, 0.1).unwrap(), features_term, 1e-12);
    // With three features the item term dominates.
    assert_rel(
        lower_bound_quantile(&gaps[..3], 0.5, 20, 0.1).unwrap(),
        0.11743506801283207,
        1e-12,
    );
}

#[test]
fn complexity_matches_oracle() {
    let mut a = vec![0.0; 100];
    a[..5].fill(1.0);
    let mut c = vec![0.0; 60];
    c[0] = 2.0;
    let mut s1 = vec![0.0; 1000];
    s1[0] = 15.0;
    let s1000 = vec![15.0 / 1000f64.sqrt(); 1000];
    let cases: [(&[f64], f64, usize, f64); 5] = [
        (&a, 0.5, 20, 160.0),
        (&[0.8; 50], 0.5, 10, 33.3125),
        (&c, 1.0 / 12.0, 12, 990.0),
        (&s1, 0.5, 20, 3033.4222222222222),
        (&s1000, 0.5, 20, 125.22222222222222),
    ];
    for (gaps, theta, n, expected) in cases {
        assert_rel(complexity_h(gaps, theta, n).unwrap(), expected, 1e-10);
    }
}

#[test]
fn instance_balancedness_matches_label_counts() {
    let inst = ProblemInstance::zero_versus(vec![1.0; 4], labels_with_ones(12, 1)).unwrap();
    assert_eq!(inst.balancedness().unwrap(), 1.0 / 12.0);
    let inst = ProblemInstance::zero_versus(vec![1.0; 4], balanced_labels(20)).unwrap();
    assert_eq!(inst.balancedness().unwrap(), 0.5);
}
