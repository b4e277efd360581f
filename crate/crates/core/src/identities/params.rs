use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use crate::numerics::{Backend, Field, Scalar};

/// Names of the free symbols an identity can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Q,
    A,
    B,
    C,
    D,
    Z,
    CVec,
    EVec,
    XVec,
    NVec,
    BigN,
}

impl Slot {
    pub fn name(self) -> &'static str {
        match self {
            Slot::Q => "q",
            Slot::A => "a",
            Slot::B => "b",
            Slot::C => "c",
            Slot::D => "d",
            Slot::Z => "z",
            Slot::CVec => "c_vec",
            Slot::EVec => "e_vec",
            Slot::XVec => "x_vec",
            Slot::NVec => "n_vec",
            Slot::BigN => "N",
        }
    }
}

/// Values for the free symbols of one identity instance.
///
/// `C = c_1 ⋯ c_r` and `E = e_1 ⋯ e_r` are derived when needed.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterAssignment {
    pub r: usize,
    pub q: Scalar,
    pub a: Option<Scalar>,
    pub b: Option<Scalar>,
    pub c: Option<Scalar>,
    pub d: Option<Scalar>,
    /// Argument of the q-binomial series.
    pub z: Option<Scalar>,
    pub c_vec: Option<Vec<Scalar>>,
    pub e_vec: Option<Vec<Scalar>>,
    pub x_vec: Option<Vec<Scalar>>,
    pub n_vec: Option<MultiIndex>,
    pub big_n: Option<u32>,
}

impl ParameterAssignment {
    pub fn new(r: usize, q: Scalar) -> Self {
        ParameterAssignment {
            r,
            q,
            a: None,
            b: None,
            c: None,
            d: None,
            z: None,
            c_vec: None,
            e_vec: None,
            x_vec: None,
            n_vec: None,
            big_n: None,
        }
    }

    pub fn backend(&self) -> Backend {
        self.q.backend()
    }

    /// Slots that carry a value.
    pub fn present(&self) -> Vec<Slot> {
        let mut v = vec![Slot::Q];
        let opt = [
            (Slot::A, self.a.is_some()),
            (Slot::B, self.b.is_some()),
            (Slot::C, self.c.is_some()),
            (Slot::D, self.d.is_some()),
            (Slot::Z, self.z.is_some()),
            (Slot::CVec, self.c_vec.is_some()),
            (Slot::EVec, self.e_vec.is_some()),
            (Slot::XVec, self.x_vec.is_some()),
            (Slot::NVec, self.n_vec.is_some()),
            (Slot::BigN, self.big_n.is_some()),
        ];
        v.extend(opt.iter().filter(|(_, p)| *p).map(|(s, _)| *s));
        v
    }

    /// Every value rendered as a string, keyed by slot name.
    pub fn render(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let one = |m: &mut BTreeMap<String, String>, s: Slot, v: &Option<Scalar>| {
            if let Some(v) = v {
                m.insert(s.name().to_string(), v.render());
            }
        };
        m.insert("q".to_string(), self.q.render());
        one(&mut m, Slot::A, &self.a);
        one(&mut m, Slot::B, &self.b);
        one(&mut m, Slot::C, &self.c);
        one(&mut m, Slot::D, &self.d);
        one(&mut m, Slot::Z, &self.z);
        for (s, v) in [(Slot::CVec, &self.c_vec), (Slot::EVec, &self.e_vec), (Slot::XVec, &self.x_vec)] {
            if let Some(v) = v {
                let parts: Vec<String> = v.iter().map(Scalar::render).collect();
                m.insert(s.name().to_string(), format!("[{}]", parts.join(",")));
            }
        }
        if let Some(n) = &self.n_vec {
            m.insert("n_vec".to_string(), n.to_string());
        }
        if let Some(n) = self.big_n {
            m.insert("N".to_string(), n.to_string());
        }
        m
    }

    /// Converts every value into the field type `T`.
    pub fn typed<T: Field>(&self) -> Result<Params<T>> {
        let one = |v: &Option<Scalar>| v.as_ref().map(T::from_scalar).transpose();
        let many = |v: &Option<Vec<Scalar>>| {
            v.as_ref().map(|xs| xs.iter().map(T::from_scalar).collect::<Result<Vec<T>>>()).transpose()
        };
        Ok(Params {
            r: self.r,
            q: T::from_scalar(&self.q)?,
            a: one(&self.a)?,
            b: one(&self.b)?,
            c: one(&self.c)?,
            d: one(&self.d)?,
            z: one(&self.z)?,
            c_vec: many(&self.c_vec)?,
            e_vec: many(&self.e_vec)?,
            x_vec: many(&self.x_vec)?,
            n_vec: self.n_vec.clone(),
            big_n: self.big_n,
        })
    }
}

/// [`ParameterAssignment`] with every value in one field type.
#[derive(Debug, Clone)]
pub struct Params<T> {
    pub r: usize,
    pub q: T,
    pub a: Option<T>,
    pub b: Option<T>,
    pub c: Option<T>,
    pub d: Option<T>,
    pub z: Option<T>,
    pub c_vec: Option<Vec<T>>,
    pub e_vec: Option<Vec<T>>,
    pub x_vec: Option<Vec<T>>,
    pub n_vec: Option<MultiIndex>,
    pub big_n: Option<u32>,
}

fn missing(s: Slot) -> Error {
    Error::Schema(format!("missing parameter `{}`", s.name()))
}

impl<T: Field> Params<T> {
    pub fn a(&self) -> Result<&T> {
        self.a.as_ref().ok_or_else(|| missing(Slot::A))
    }
    pub fn b(&self) -> Result<&T> {
        self.b.as_ref().ok_or_else(|| missing(Slot::B))
    }
    pub fn c(&self) -> Result<&T> {
        self.c.as_ref().ok_or_else(|| missing(Slot::C))
    }
    pub fn d(&self) -> Result<&T> {
        self.d.as_ref().ok_or_else(|| missing(Slot::D))
    }
    pub fn z(&self) -> Result<&T> {
        self.z.as_ref().ok_or_else(|| missing(Slot::Z))
    }
    pub fn cv(&self) -> Result<&[T]> {
        self.c_vec.as_deref().ok_or_else(|| missing(Slot::CVec))
    }
    pub fn ev(&self) -> Result<&[T]> {
        self.e_vec.as_deref().ok_or_else(|| missing(Slot::EVec))
    }
    pub fn xv(&self) -> Result<&[T]> {
        self.x_vec.as_deref().ok_or_else(|| missing(Slot::XVec))
    }
    pub fn n(&self) -> Result<&MultiIndex> {
        self.n_vec.as_ref().ok_or_else(|| missing(Slot::NVec))
    }
    pub fn big_n(&self) -> Result<u32> {
        self.big_n.ok_or_else(|| missing(Slot::BigN))
    }

    /// `C = c_1 ⋯ c_r`.
    pub fn cprod(&self) -> Result<T> {
        Ok(self.cv()?.iter().fold(self.q.one_like(), |acc, c| acc.mul(c)))
    }

    /// `E = e_1 ⋯ e_r`.
    pub fn eprod(&self) -> Result<T> {
        Ok(self.ev()?.iter().fold(self.q.one_like(), |acc, e| acc.mul(e)))
    }
}
