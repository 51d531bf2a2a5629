//! Reference states with known scaling of the largest additive-operator
//! fluctuation.

use crate::error::{Error, Result};
use crate::statevector::{PauliAxis, PureState};
use crate::vcm::AdditiveOperatorCoeffs;

pub const MIN_SITES: usize = 3;

fn check(l: usize) -> Result<()> {
    if l < MIN_SITES {
        return Err(Error::InvalidArgument(format!("catalog states need L >= {MIN_SITES}, got {l}")));
    }
    Ok(())
}

fn check_even(l: usize) -> Result<()> {
    check(l)?;
    if !l.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("L must be even, got {l}")));
    }
    Ok(())
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(l: usize) -> Result<PureState> {
    check(l)?;
    PureState::uniform_over(l, &[0, (1 << l) - 1])
}

/// `|1^j 0^(L-j)⟩`: the first `j` sites flipped.
pub fn wall_ket(l: usize, j: usize) -> usize {
    ((1usize << j) - 1) << (l - j)
}

/// Equal superposition of the `L - 1` single-domain-wall kets `|1^j 0^(L-j)⟩`.
pub fn domain_wall(l: usize) -> Result<PureState> {
    check(l)?;
    let kets: Vec<usize> = (1..l).map(|j| wall_ket(l, j)).collect();
    PureState::uniform_over(l, &kets)
}

/// Equal superposition of all single-excitation kets.
pub fn w_state(l: usize) -> Result<PureState> {
    check(l)?;
    let kets: Vec<usize> = (0..l).map(|b| 1 << b).collect();
    PureState::uniform_over(l, &kets)
}

/// Alternating pattern `1010…10` (site 1 set).
pub fn staggered_ket(l: usize) -> usize {
    (1..=l).filter(|s| s % 2 == 1).fold(0, |acc, s| acc | (1 << (l - s)))
}

/// `(|1010…10⟩ + |0101…01⟩)/√2`, the two-solution |β⟩ with a staggered
/// macroscopic fluctuation.
pub fn staggered_pair_beta(l: usize) -> Result<PureState> {
    check_even(l)?;
    let x0 = staggered_ket(l);
    let x1 = !x0 & ((1 << l) - 1);
    PureState::uniform_over(l, &[x0, x1])
}

/// `(|0…00⟩ + |0…01⟩)/√2`, a two-solution |β⟩ that is a product state.
pub fn adjacent_pair_beta(l: usize) -> Result<PureState> {
    check(l)?;
    PureState::uniform_over(l, &[0, 1])
}

/// `|→→…→⟩`.
pub fn plus_product(l: usize) -> Result<PureState> {
    check(l)?;
    let mut s = PureState::basis_state(l, 0)?;
    s.hadamard_transform();
    Ok(s)
}

/// `Σ_l (-1)^l σ_z(l)`.
pub fn staggered_z(l: usize) -> Result<AdditiveOperatorCoeffs> {
    let signs: Vec<f64> = (1..=l).map(|s| if s % 2 == 0 { 1.0 } else { -1.0 }).collect();
    AdditiveOperatorCoeffs::signed_axis(&signs, PauliAxis::Z)
}

fn uniform_z(l: usize) -> Result<AdditiveOperatorCoeffs> {
    AdditiveOperatorCoeffs::uniform_axis(l, PauliAxis::Z)
}

fn linear(l: usize) -> f64 {
    l as f64
}

fn two(_: usize) -> f64 {
    2.0
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub constructor: fn(usize) -> Result<PureState>,
    pub expected_p: u8,
    pub expected_emax: Option<fn(usize) -> f64>,
    pub expected_emax_label: Option<&'static str>,
    pub witness: Option<fn(usize) -> Result<AdditiveOperatorCoeffs>>,
    pub witness_label: Option<&'static str>,
    pub even_only: bool,
}

impl CatalogEntry {
    pub fn build(&self, l: usize) -> Result<PureState> {
        (self.constructor)(l)
    }

    pub fn accepts(&self, l: usize) -> bool {
        l >= MIN_SITES && (!self.even_only || l.is_multiple_of(2))
    }
}

pub fn entries() -> &'static [CatalogEntry] {
    static ENTRIES: [CatalogEntry; 6] = [
        CatalogEntry {
            name: "ghz",
            constructor: ghz,
            expected_p: 2,
            expected_emax: Some(linear),
            expected_emax_label: Some("L"),
            witness: Some(uniform_z),
            witness_label: Some("uniform z"),
            even_only: false,
        },
        CatalogEntry {
            name: "domain-wall",
            constructor: domain_wall,
            expected_p: 2,
            expected_emax: None,
            expected_emax_label: None,
            witness: Some(uniform_z),
            witness_label: Some("uniform z"),
            even_only: false,
        },
        CatalogEntry {
            name: "w",
            constructor: w_state,
            expected_p: 1,
            expected_emax: None,
            expected_emax_label: None,
            witness: None,
            witness_label: None,
            even_only: false,
        },
        CatalogEntry {
            name: "staggered-pair",
            constructor: staggered_pair_beta,
            expected_p: 2,
            expected_emax: Some(linear),
            expected_emax_label: Some("L"),
            witness: Some(staggered_z),
            witness_label: Some("staggered z"),
            even_only: true,
        },
        CatalogEntry {
            name: "adjacent-pair",
            constructor: adjacent_pair_beta,
            expected_p: 1,
            expected_emax: Some(two),
            expected_emax_label: Some("2"),
            witness: None,
            witness_label: None,
            even_only: false,
        },
        CatalogEntry {
            name: "product",
            constructor: plus_product,
            expected_p: 1,
            expected_emax: Some(two),
            expected_emax_label: Some("2"),
            witness: None,
            witness_label: None,
            even_only: false,
        },
    ];
    &ENTRIES
}

pub fn lookup(name: &str) -> Result<&'static CatalogEntry> {
    entries().iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<&str> = entries().iter().map(|e| e.name).collect();
        Error::InvalidArgument(format!("unknown catalog state `{name}` (known: {})", names.join(", ")))
    })
}
