use crate::error::{Error, Result};
use crate::series::{ExtReal, Jet};

/// Jets of `f_2, f_4, ..., f_{n_max}` at one point of the flow.
#[derive(Clone, Debug)]
pub struct MomentTower {
    center: ExtReal,
    jets: Vec<Jet>,
    n_max: usize,
}

impl MomentTower {
    pub(crate) fn from_jets(center: ExtReal, jets: Vec<Jet>) -> Self {
        let n_max = 2 * jets.len();
        MomentTower { center, jets, n_max }
    }

    pub fn center(&self) -> &ExtReal {
        &self.center
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Jet of `f_n` for even `2 <= n <= n_max`.
    pub fn jet(&self, n: usize) -> Option<&Jet> {
        if n < 2 || n % 2 == 1 {
            return None;
        }
        self.jets.get(n / 2 - 1)
    }

    pub fn jets(&self) -> impl Iterator<Item = (usize, &Jet)> {
        self.jets.iter().enumerate().map(|(i, j)| (2 * i + 2, j))
    }
}

pub(crate) fn check_tower_order(f2: &Jet, n_max: usize) -> Result<()> {
    if n_max < 2 || n_max % 2 == 1 {
        return Err(Error::Contract(format!("n_max must be even and at least 2, got {n_max}")));
    }
    let needed = n_max / 2 - 1;
    if f2.order() < needed {
        return Err(Error::Order { needed, available: f2.order() });
    }
    Ok(())
}

/// Ordered-pair sum `sum_{n1 + n2 = m, n_i >= 2} f_{n1} f_{n2}` over the jets built so far.
pub(crate) fn pair_product(jets: &[Jet], m: usize, order: usize) -> Result<Jet> {
    let center = jets[0].center().clone();
    let mut acc = Jet::zero(center, order);
    let mut n1 = 2;
    while n1 + 2 <= m {
        let a = jets[n1 / 2 - 1].truncate(order);
        let b = jets[(m - n1) / 2 - 1].truncate(order);
        acc = acc.checked_add(&a.checked_mul(&b)?)?;
        n1 += 2;
    }
    Ok(acc)
}

/// Moment jets up to `n_max` from the jet of `f_2`, one derivative order spent per step.
pub fn tower_jets(f2: &Jet, n_components: u32, n_max: usize) -> Result<MomentTower> {
    check_tower_order(f2, n_max)?;
    if n_components == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let p = f2.prec();
    let nn = n_components as i64;
    let mut jets = vec![f2.clone()];
    for n in (2..n_max).step_by(2) {
        let ni = n as i64;
        let fnj = &jets[n / 2 - 1];
        let order = fnj.order() - 1;
        let d = fnj.derivative()?;
        let lin = fnj.truncate(order).scale(&ExtReal::from_ratio(ni - 4, ni * (ni + nn), p));
        let dterm = d.scale(&ExtReal::from_ratio(2, ni * (ni + nn), p));
        let quad = pair_product(&jets, n + 2, order)?.scale(&ExtReal::from_ratio(1, ni + nn, p));
        let next = quad.checked_add(&lin)?.checked_add(&dterm)?;
        jets.push(next);
    }
    Ok(MomentTower::from_jets(f2.center().clone(), jets))
}
