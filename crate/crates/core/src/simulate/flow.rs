//! Order signs and volumes.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::scenario::{SignModel, VolumeModel};
use crate::orderflow::Sign;

pub fn gen_signs<R: Rng>(rng: &mut R, model: &SignModel, n: usize) -> Vec<Sign> {
    let pick = |buy: bool| if buy { Sign::Buy } else { Sign::Sell };
    match *model {
        SignModel::Iid { p_buy } => (0..n).map(|_| pick(rng.random_bool(p_buy))).collect(),
        SignModel::Markov { persistence } => {
            let mut out = Vec::with_capacity(n);
            let mut s = pick(rng.random_bool(0.5));
            for k in 0..n {
                if k > 0 && !rng.random_bool(persistence) {
                    s = s.flip();
                }
                out.push(s);
            }
            out
        }
    }
}

pub fn gen_volumes<R: Rng>(rng: &mut R, model: &VolumeModel, n: usize) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            let v = (model.mu + model.sigma * z).exp().round();
            if v.is_finite() && v >= 1.0 {
                v.min(u64::MAX as f64) as u64
            } else if v.is_finite() {
                1
            } else {
                u64::MAX
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_sign_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = gen_signs(&mut rng, &SignModel::Markov { persistence: 1.0 }, 100);
        assert!(s.iter().all(|&x| x == s[0]));
        let s = gen_signs(&mut rng, &SignModel::Markov { persistence: 0.0 }, 100);
        assert!(s.windows(2).all(|w| w[0] != w[1]));
        let s = gen_signs(&mut rng, &SignModel::Iid { p_buy: 1.0 }, 50);
        assert!(s.iter().all(|&x| x == Sign::Buy));
    }

    #[test]
    fn volumes_at_least_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = gen_volumes(&mut rng, &VolumeModel { mu: -3.0, sigma: 1.0 }, 1000);
        assert!(v.iter().all(|&x| x >= 1));
        let v = gen_volumes(&mut rng, &VolumeModel { mu: 2.0f64.ln(), sigma: 0.0 }, 10);
        assert_eq!(v, vec![2; 10]);
    }
}
