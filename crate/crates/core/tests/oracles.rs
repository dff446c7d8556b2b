//! Values frozen from an independent implementation: monomial images from
//! the difference form, eigenvectors by back-substitution on the operator
//! matrix, `q < 1` limits from the limit eigen relation, and `q > 1` limits
//! recovered from exact coefficients at `n = 140`.

use qbernstein::asymptotics::{
    derived_limit_coeffs_q_above_1, limit_coeffs, limit_coeffs_q_below_1, LimitFormula,
};
use qbernstein::bernstein::monomial_image;
use qbernstein::eigen::eigensystem;
use qbernstein::{ExactParams, Rational, Scalar};

fn q(s: &str) -> Rational {
    Rational::parse(s).unwrap()
}

fn v(items: &[&str]) -> Vec<Rational> {
    items.iter().map(|s| q(s)).collect()
}

fn params(n: usize, qv: &str, alpha: &str) -> ExactParams {
    ExactParams::new(n, q(qv), q(alpha)).unwrap()
}

#[test]
fn eigensystem_n4_q2_3_alpha2_5() {
    let sys = eigensystem(&params(4, "2/3", "2/5")).unwrap();
    assert_eq!(
        sys.lambdas,
        v(&["1", "1", "2254/4225", "7144/54925", "2432/274625"])
    );
    assert_eq!(
        sys.vectors[3].coeffs(),
        v(&["0", "3621/6155", "-9776/6155", "1"]).as_slice()
    );
    assert_eq!(
        sys.vectors[4].coeffs(),
        v(&[
            "0",
            "-3645297/10358335",
            "16481337/10358335",
            "-2125/949",
            "1"
        ])
        .as_slice()
    );
}

#[test]
fn eigensystem_n5_q3_2_alpha1_4() {
    let sys = eigensystem(&params(5, "3/2", "1/4")).unwrap();
    assert_eq!(
        sys.lambdas,
        v(&[
            "1",
            "1",
            "38715/44521",
            "5719950/9393931",
            "1129895325/3964238882",
            "364627575/7928477764"
        ])
    );
    assert_eq!(
        sys.vectors[5].coeffs(),
        v(&[
            "0",
            "318768488154884672/13457053029037946717",
            "-4515359587437084776/13457053029037946717",
            "42339614934/30912566183",
            "-182797/88831",
            "1",
        ])
        .as_slice()
    );
}

#[test]
fn eigensystem_n6_q1_3_alpha3_4() {
    let sys = eigensystem(&params(6, "1/3", "3/4")).unwrap();
    assert_eq!(sys.lambdas[6], q("1815/61443165056"));
    assert_eq!(
        sys.vectors[6].coeffs(),
        v(&[
            "0",
            "-140880531304115409267868081830165/246536473401947927609077309601504",
            "113932964476097360619454738518723/35219496200278275372725329943072",
            "-422936690888133448965/58137954901197835846",
            "30781928416605/3786054164438",
            "-548185/121303",
            "1",
        ])
        .as_slice()
    );
}

#[test]
fn monomial_images_n5_q1_3_alpha3_4() {
    let p = params(5, "1/3", "3/4");
    let expected = [
        v(&["0", "1"]),
        v(&["0", "9828/14641", "4813/14641"]),
        v(&["0", "798984/1771561", "911178/1771561", "61399/1771561"]),
        v(&[
            "0",
            "65032632/214358881",
            "11844225/19487171",
            "18808374/214358881",
            "231400/214358881",
        ]),
        v(&[
            "0",
            "5301655416/25937424601",
            "16673979600/25937424601",
            "3862961505/25937424601",
            "98639320/25937424601",
            "1560/214358881",
        ]),
    ];
    for (k, e) in expected.iter().enumerate() {
        assert_eq!(
            &monomial_image(k + 1, &p).unwrap().coeffs,
            e,
            "k = {}",
            k + 1
        );
    }
}

#[test]
fn below_one_limits() {
    let cases = [
        ("1/2", 3, v(&["0", "2/3", "-5/3", "1"])),
        ("1/2", 4, v(&["0", "-104/217", "414/217", "-17/7", "1"])),
        ("1/3", 3, v(&["0", "3/4", "-7/4", "1"])),
        ("1/3", 4, v(&["0", "-999/1573", "3540/1573", "-34/13", "1"])),
    ];
    for (qv, k, expected) in cases {
        for alpha in ["0", "1/2", "1"] {
            assert_eq!(
                limit_coeffs_q_below_1(&q(qv), &q(alpha), k).unwrap().coeffs,
                expected
            );
        }
    }
}

#[test]
fn above_one_limits() {
    let cases = [
        ("3/2", "0", 3, v(&["0", "66/155", "-221/155", "1"])),
        (
            "3/2",
            "0",
            4,
            v(&["0", "-525096/4432111", "4000542/4432111", "-3017/1691", "1"]),
        ),
        ("3/2", "1/2", 3, v(&["0", "102/245", "-347/245", "1"])),
        ("3/2", "1", 3, v(&["0", "2/5", "-7/5", "1"])),
        (
            "3/2",
            "1",
            4,
            v(&["0", "-56/551", "462/551", "-33/19", "1"]),
        ),
        ("2", "0", 3, v(&["0", "10/27", "-37/27", "1"])),
        (
            "2",
            "0",
            4,
            v(&["0", "-1480/20587", "14282/20587", "-193/119", "1"]),
        ),
        ("2", "1/2", 3, v(&["0", "14/39", "-53/39", "1"])),
        (
            "2",
            "1/2",
            4,
            v(&["0", "-424/6325", "29786/44275", "-281/175", "1"]),
        ),
        ("2", "1", 3, v(&["0", "1/3", "-4/3", "1"])),
        ("2", "1", 4, v(&["0", "-2/35", "22/35", "-11/7", "1"])),
    ];
    for (qv, alpha, k, expected) in cases {
        let got = derived_limit_coeffs_q_above_1(&q(qv), &q(alpha), k)
            .unwrap()
            .coeffs;
        assert_eq!(got, expected, "q = {qv}, alpha = {alpha}, k = {k}");
    }
}

#[test]
fn printed_above_one_limit_matches_only_at_alpha_one() {
    for qv in ["3/2", "2"] {
        for k in 2..=4 {
            let printed = limit_coeffs(&q(qv), &q("1"), k, LimitFormula::AsPrinted).unwrap();
            let derived = limit_coeffs(&q(qv), &q("1"), k, LimitFormula::Derived).unwrap();
            assert_eq!(printed.coeffs, derived.coeffs);
        }
        let printed = limit_coeffs(&q(qv), &q("0"), 3, LimitFormula::AsPrinted).unwrap();
        let derived = limit_coeffs(&q(qv), &q("0"), 3, LimitFormula::Derived).unwrap();
        assert_ne!(printed.coeffs, derived.coeffs);
    }
}
