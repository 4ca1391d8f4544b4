//! The 24 single-qubit Clifford operations, stored by their action on `X` and `Z`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Pauli;

/// Signed Hermitian single-qubit Pauli, `(-1)^negative · pauli`.
pub type SignedPauli = (Pauli, bool);

/// A single-qubit Clifford `U`, identified by `U X U†` and `U Z U†`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct LocalClifford {
    x_image: SignedPauli,
    z_image: SignedPauli,
}

/// Exponent of `i` in the product `P1 · P2` of two Hermitian Paulis.
pub(crate) fn product_phase(a: Pauli, b: Pauli) -> i32 {
    let (x1, z1) = a.bits();
    let (x2, z2) = b.bits();
    let (x1, z1, x2, z2) = (x1 as i32, z1 as i32, x2 as i32, z2 as i32);
    match (x1, z1) {
        (0, 0) => 0,
        (1, 1) => z2 - x2,
        (1, 0) => z2 * (2 * x2 - 1),
        _ => x2 * (1 - 2 * z2),
    }
}

impl LocalClifford {
    pub const IDENTITY: Self = Self {
        x_image: (Pauli::X, false),
        z_image: (Pauli::Z, false),
    };
    pub const H: Self = Self {
        x_image: (Pauli::Z, false),
        z_image: (Pauli::X, false),
    };
    pub const S: Self = Self {
        x_image: (Pauli::Y, false),
        z_image: (Pauli::Z, false),
    };
    pub const S_DAG: Self = Self {
        x_image: (Pauli::Y, true),
        z_image: (Pauli::Z, false),
    };
    pub const X: Self = Self {
        x_image: (Pauli::X, false),
        z_image: (Pauli::Z, true),
    };
    pub const Z: Self = Self {
        x_image: (Pauli::X, true),
        z_image: (Pauli::Z, false),
    };

    /// Builds the element from its images, which must be anticommuting Paulis.
    pub fn from_images(x_image: SignedPauli, z_image: SignedPauli) -> Option<Self> {
        let (a, b) = (x_image.0, z_image.0);
        (a != Pauli::I && b != Pauli::I && a != b).then_some(Self { x_image, z_image })
    }

    pub fn x_image(&self) -> SignedPauli {
        self.x_image
    }

    pub fn z_image(&self) -> SignedPauli {
        self.z_image
    }

    /// `U P U†` for a Hermitian Pauli `P`.
    pub fn conjugate(&self, p: Pauli) -> SignedPauli {
        match p {
            Pauli::I => (Pauli::I, false),
            Pauli::X => self.x_image,
            Pauli::Z => self.z_image,
            Pauli::Y => {
                // Y = i X Z
                let (a, sa) = self.x_image;
                let (b, sb) = self.z_image;
                let phase = (1 + product_phase(a, b)).rem_euclid(4);
                debug_assert!(phase == 0 || phase == 2);
                let (x1, z1) = a.bits();
                let (x2, z2) = b.bits();
                (Pauli::from_bits(x1 ^ x2, z1 ^ z2), sa ^ sb ^ (phase == 2))
            }
        }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Self) -> Self {
        let img = |(p, s): SignedPauli| {
            let (q, t) = self.conjugate(p);
            (q, s ^ t)
        };
        Self {
            x_image: img(first.x_image),
            z_image: img(first.z_image),
        }
    }

    /// All 24 elements, generated from `H` and `S` in breadth-first order.
    pub fn all() -> Vec<Self> {
        let mut out = vec![Self::IDENTITY];
        let mut i = 0;
        while i < out.len() {
            for g in [Self::H, Self::S] {
                let next = g.after(&out[i]);
                if !out.contains(&next) {
                    out.push(next);
                }
            }
            i += 1;
        }
        out
    }

    pub fn inverse(&self) -> Self {
        Self::all()
            .into_iter()
            .find(|c| c.after(self) == Self::IDENTITY)
            .expect("group is closed")
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

impl Default for LocalClifford {
    fn default() -> Self {
        Self::IDENTITY
    }
}

fn fmt_signed((p, s): SignedPauli) -> String {
    format!("{}{p}", if s { '-' } else { '+' })
}

impl fmt::Display for LocalClifford {
    /// `X->+Z,Z->+X` style label.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "X->{},Z->{}",
            fmt_signed(self.x_image),
            fmt_signed(self.z_image)
        )
    }
}

impl FromStr for LocalClifford {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_signed = |t: &str| -> Option<SignedPauli> {
            let mut c = t.chars();
            let neg = match c.next()? {
                '+' => false,
                '-' => true,
                _ => return None,
            };
            let p = c.as_str().parse::<Pauli>().ok()?;
            Some((p, neg))
        };
        let bad = || format!("invalid local Clifford label `{s}`");
        let (xs, zs) = s.split_once(',').ok_or_else(bad)?;
        let x = parse_signed(xs.strip_prefix("X->").ok_or_else(bad)?).ok_or_else(bad)?;
        let z = parse_signed(zs.strip_prefix("Z->").ok_or_else(bad)?).ok_or_else(bad)?;
        Self::from_images(x, z).ok_or_else(bad)
    }
}

impl From<LocalClifford> for String {
    fn from(c: LocalClifford) -> Self {
        c.to_string()
    }
}

impl TryFrom<String> for LocalClifford {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}
