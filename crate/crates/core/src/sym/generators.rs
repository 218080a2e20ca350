//! The m = 9 n(n-1)/2 cost-1 generators: every CNOT-equivalent entangling
//! transformation a_i b_j CNOT_{i,j} with a, b in {I, PH, HP}.

use crate::sym::gl2::Gl2;
use crate::sym::tableau::{Circuit, Gate, Tableau};

/// Single-qubit factor in front of the CNOT, named by circuit order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PreGate {
    None,
    /// p then h: the matrix P*H.
    PThenH,
    /// h then p: the matrix H*P.
    HThenP,
}

impl PreGate {
    fn gl2(self) -> Gl2 {
        match self {
            PreGate::None => Gl2::I,
            PreGate::PThenH => Gl2::PH,
            PreGate::HThenP => Gl2::HP,
        }
    }

    fn gates(self, q: u8) -> Vec<Gate> {
        self.gl2().gate_word(q)
    }
}

/// The fixed panel order of the nine (a, b) dressings.
pub const PANELS: [(PreGate, PreGate); 9] = [
    (PreGate::None, PreGate::None),
    (PreGate::None, PreGate::PThenH),
    (PreGate::None, PreGate::HThenP),
    (PreGate::PThenH, PreGate::None),
    (PreGate::HThenP, PreGate::None),
    (PreGate::PThenH, PreGate::PThenH),
    (PreGate::PThenH, PreGate::HThenP),
    (PreGate::HThenP, PreGate::PThenH),
    (PreGate::HThenP, PreGate::HThenP),
];

#[derive(Clone, Debug)]
pub struct Generator {
    /// Control qubit i (1-based), i < j.
    pub control: u8,
    /// Target qubit j.
    pub target: u8,
    pub dress: (PreGate, PreGate),
    pub tableau: Tableau,
    pub inverse: Tableau,
    pub circuit: Circuit,
}

/// All generators for a qubit count, in the fixed enumeration order: outer
/// loop over pairs (i, j) with i < j lexicographically, inner loop over the
/// nine panels.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    n: u8,
    gens: Vec<Generator>,
}

impl GeneratorSet {
    pub fn new(n: u8) -> GeneratorSet {
        assert!((2..=6).contains(&n), "generators need 2..=6 qubits, got {n}");
        let mut gens = Vec::with_capacity(expected_count(n));
        for i in 1..=n {
            for j in i + 1..=n {
                for &(a, b) in &PANELS {
                    let mut gates = a.gates(i);
                    gates.extend(b.gates(j));
                    gates.push(Gate::Cnot(i, j));
                    let circuit = Circuit::new(n, gates);
                    let tableau = circuit.replay();
                    gens.push(Generator {
                        control: i,
                        target: j,
                        dress: (a, b),
                        inverse: tableau.inverse(),
                        tableau,
                        circuit,
                    });
                }
            }
        }
        debug_assert_eq!(gens.len(), expected_count(n));
        GeneratorSet { n, gens }
    }

    #[inline]
    pub fn n(&self) -> u8 {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    #[inline]
    pub fn get(&self, index: usize) -> &Generator {
        &self.gens[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Generator> {
        self.gens.iter()
    }

    /// Applies generator `index` on the right of a tableau.
    pub fn apply(&self, t: &mut Tableau, index: usize) {
        for g in &self.gens[index].circuit.gates {
            t.apply_gate(*g);
        }
    }
}

pub fn expected_count(n: u8) -> usize {
    9 * n as usize * (n as usize - 1) / 2
}
