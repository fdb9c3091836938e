mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(index: usize, seed: u64) -> Result<(), TestCaseError> {
    let (name, check) = common::PROPERTIES[index];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    check(&mut rng).map_err(|e| TestCaseError::fail(format!("{name}: {e}")))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn unitarity_preservation(seed in any::<u64>()) {
        run(0, seed)?;
    }

    #[test]
    fn distribution_normalization(seed in any::<u64>()) {
        run(1, seed)?;
    }

    #[test]
    fn phase_canonical_keying(seed in any::<u64>()) {
        run(2, seed)?;
    }

    #[test]
    fn dot_byte_stability(seed in any::<u64>()) {
        run(3, seed)?;
    }

    #[test]
    fn closure_group_axioms(seed in any::<u64>()) {
        run(4, seed)?;
    }
}
