//! Squared Wasserstein-2 distance to a fixed target as an objective.
//!
//! The optimal pairing is recomputed at every evaluation; by Danskin's
//! theorem the gradient at particle i is 2 (w_i - v_{sigma(i)}) for the
//! current optimal pairing sigma.

use crate::error::Result;
use crate::measure::SparseMeasure;
use crate::transport::{optimal_plan, TransportPlan};

use super::{check_dim, Gradient, Objective, Regularity};

#[derive(Debug, Clone)]
pub struct W2Objective {
    target: SparseMeasure,
}

impl W2Objective {
    pub fn new(target: &SparseMeasure) -> Self {
        W2Objective { target: target.clone() }
    }

    pub fn target(&self) -> &SparseMeasure {
        &self.target
    }

    pub fn plan(&self, mu: &SparseMeasure) -> Result<TransportPlan> {
        optimal_plan(mu, &self.target)
    }
}

impl Objective for W2Objective {
    fn dim(&self) -> usize {
        self.target.dim()
    }

    fn value(&self, mu: &SparseMeasure) -> Result<f64> {
        check_dim(self.dim(), mu)?;
        Ok(optimal_plan(mu, &self.target)?.squared_cost)
    }

    fn gradient(&self, mu: &SparseMeasure) -> Result<Gradient> {
        check_dim(self.dim(), mu)?;
        let plan = optimal_plan(mu, &self.target)?;
        let d = self.dim();
        let mut grad = Gradient::zeros(mu.n(), d);
        for (i, w) in mu.rows().enumerate() {
            let v = self.target.particle(plan.permutation[i]);
            let row = grad.row_mut(i);
            for l in 0..d {
                row[l] = 2.0 * (w[l] - v[l]);
            }
        }
        Ok(grad)
    }

    fn regularity(&self) -> Regularity {
        Regularity { lambda: None, smoothness: Some(2.0), lipschitz: None, star_convex: true }
    }
}
