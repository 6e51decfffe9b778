use super::kernel::HKernel;
use crate::error::Result;
use crate::massless::{check_tower_order, pair_product, MomentTower};
use crate::series::{ExtReal, Jet};

/// Tilded moment jets: each level uses `beta0 e^mu` and `(log H)'` at the same center.
pub fn massive_tower_jets(f2t: &Jet, kernel: &HKernel, n_max: usize) -> Result<MomentTower> {
    check_tower_order(f2t, n_max)?;
    let center = f2t.center().clone();
    let order = f2t.order();
    let p = f2t.prec();
    let e = kernel.e_jet(&center, order);
    let lh = kernel.h_jets(&center, order)?.log_h_prime;
    // Q = 2 + beta0 - beta0 e^mu
    let q = e.scale(&ExtReal::from_i64(-1, p)).add_constant(&(kernel.beta0().with_prec(p) + 2));
    let mut jets = vec![f2t.clone()];
    for n in (2..n_max).step_by(2) {
        let ni = n as i64;
        let d = ni * (ni + 1);
        let fnj = &jets[n / 2 - 1];
        let o = fnj.order() - 1;
        let f = fnj.truncate(o);
        let mut next = fnj.derivative()?.scale(&ExtReal::from_ratio(2, d, p));
        next = next.checked_add(&f.scale(&ExtReal::from_ratio(ni - 4, d, p)))?;
        if n > 2 {
            let t = lh.truncate(o).checked_mul(&f)?.scale(&ExtReal::from_ratio(-(ni - 2), d, p));
            next = next.checked_add(&t)?;
        }
        let t = e.truncate(o).checked_mul(&f)?.scale(&ExtReal::from_ratio(1, ni + 1, p));
        next = next.checked_add(&t)?;
        let quad = pair_product(&jets, n + 2, o)?;
        let t = q.truncate(o).checked_mul(&quad)?.scale(&ExtReal::from_ratio(1, ni + 1, p));
        next = next.checked_add(&t)?;
        jets.push(next);
    }
    Ok(MomentTower::from_jets(center, jets))
}
