//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

pub mod laws;

use nalgebra::DMatrix;
use qswitch::matquant::{hermitian_expm, ComplexMatrix, DensityMatrix, Ket, C64};
use qswitch::protocol::ProtocolParams;
use qswitch::switch::QuantumChannel;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussianish(rng: &mut impl Rng) -> f64 {
    // Sum of uniforms; only used to spread entries, not for statistics.
    (0..4).map(|_| rng.gen_range(-1.0..1.0)).sum::<f64>() / 2.0
}

pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| C64::new(gaussianish(rng), gaussianish(rng)))
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_nalgebra(random_complex(rng, dim, dim)).hermitian_part()
}

pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, dim);
    hermitian_expm(&h, rng.gen_range(-3.0..3.0)).unwrap()
}

pub fn random_ket(rng: &mut impl Rng, dim: usize) -> Ket {
    let v = random_complex(rng, dim, 1);
    let norm = v.norm();
    Ket::new(&v.iter().map(|z| z / norm).collect::<Vec<_>>())
}

/// `A A† / Tr(A A†)` with `A` of the given rank.
pub fn random_density(rng: &mut impl Rng, qubits: usize, rank: usize) -> DensityMatrix {
    let dim = 1 << qubits;
    let a = random_complex(rng, dim, rank);
    let m = &a * a.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_computed(ComplexMatrix::from_nalgebra(m / C64::new(tr, 0.0)), true).unwrap()
}

pub fn random_two_qubit_state(rng: &mut impl Rng) -> DensityMatrix {
    let rank = rng.gen_range(1..=4);
    random_density(rng, 2, rank)
}

/// Two Kraus operators cut from a random 2d×d isometry.
pub fn random_channel(rng: &mut impl Rng, dim: usize) -> QuantumChannel {
    let q = random_complex(rng, 2 * dim, dim).qr().q();
    let k1 = ComplexMatrix::from_nalgebra(q.rows(0, dim).into_owned());
    let k2 = ComplexMatrix::from_nalgebra(q.rows(dim, dim).into_owned());
    QuantumChannel::new("random", vec![k1, k2]).unwrap()
}

/// Two channels whose Kraus operators are all functions of one Hermitian
/// matrix, hence mutually commuting.
pub fn commuting_channels(rng: &mut impl Rng, dim: usize) -> (QuantumChannel, QuantumChannel) {
    let h = random_hermitian(rng, dim);
    let mixture = |rng: &mut ChaCha8Rng| {
        let p: f64 = rng.gen_range(0.0..1.0);
        let u1 = hermitian_expm(&h, rng.gen_range(-4.0..4.0)).unwrap();
        let u2 = hermitian_expm(&h, rng.gen_range(-4.0..4.0)).unwrap();
        QuantumChannel::new("mix", vec![u1.scale_real(p.sqrt()), u2.scale_real((1.0 - p).sqrt())]).unwrap()
    };
    let mut inner = rng_from(rng);
    (mixture(&mut inner), mixture(&mut inner))
}

fn rng_from(rng: &mut impl Rng) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(rng.gen())
}

pub fn random_params(rng: &mut impl Rng) -> ProtocolParams {
    ProtocolParams::new(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        rng.gen_range(0.0..20.0),
    )
}

pub fn local_unitary(rng: &mut impl Rng) -> ComplexMatrix {
    qswitch::matquant::kron(&random_unitary(rng, 2), &random_unitary(rng, 2))
}
