//! Cash, rent and net worth.

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::inventory::InventoryLedger;
use crate::money::Money;

/// Consecutive unpaid rent days that end an episode.
pub const TERMINATION_UNPAID_DAYS: u32 = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinancialState {
    pub funds: Money,
    pub consecutive_unpaid_rent_days: u32,
    pub cumulative_income: Money,
    pub cumulative_procurement: Money,
    pub cumulative_rent_paid: Money,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RentOutcome {
    pub amount: Money,
    pub paid: bool,
    pub consecutive_unpaid: u32,
}

impl FinancialState {
    pub fn new(initial_funds: Money) -> Self {
        FinancialState {
            funds: initial_funds,
            consecutive_unpaid_rent_days: 0,
            cumulative_income: Money::ZERO,
            cumulative_procurement: Money::ZERO,
            cumulative_rent_paid: Money::ZERO,
        }
    }

    /// Books the day's income, then charges rent if it is affordable. Unpaid
    /// rent is not carried as debt; funds never go negative.
    pub fn settle_day(&mut self, revenue: Money, refunds: Money, rent: Money) -> RentOutcome {
        let income = revenue - refunds;
        self.funds += income;
        self.cumulative_income += income;
        let paid = self.funds >= rent;
        if paid {
            self.funds -= rent;
            self.cumulative_rent_paid += rent;
            self.consecutive_unpaid_rent_days = 0;
        } else {
            self.consecutive_unpaid_rent_days += 1;
        }
        RentOutcome {
            amount: rent,
            paid,
            consecutive_unpaid: self.consecutive_unpaid_rent_days,
        }
    }

    pub fn debit_procurement(&mut self, amount: Money) -> Result<()> {
        if amount > self.funds {
            return Err(Error::Funds {
                needed: amount,
                available: self.funds,
            });
        }
        self.funds -= amount;
        self.cumulative_procurement += amount;
        Ok(())
    }

    pub fn check_termination(&self) -> bool {
        self.consecutive_unpaid_rent_days >= TERMINATION_UNPAID_DAYS
    }
}

/// Value of one unit of cost `cost` and shelf life `shelf_life` at `age` days.
pub fn unit_value(cost: Money, shelf_life: u32, age: u32) -> f64 {
    cost.to_f64() * (1.0 - f64::from(age) / f64::from(shelf_life)).max(0.0)
}

/// Funds plus on-hand stock valued at reference cost with linear shelf-life
/// depreciation. Queued units are not counted.
pub fn net_worth(state: &FinancialState, ledger: &InventoryLedger, catalog: &Catalog, day: u32) -> Money {
    let stock: f64 = (0..catalog.len())
        .flat_map(|j| {
            let sku = catalog.sku(j);
            ledger
                .lots(j)
                .iter()
                .map(move |lot| lot.quantity as f64 * unit_value(sku.reference_cost, sku.shelf_life_days, lot.age(day)))
        })
        .sum();
    state.funds + Money::from_f64(stock)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rent_paid_and_unpaid() {
        let mut f = FinancialState::new(Money::from_units(10_000));
        let r = f.settle_day(Money::ZERO, Money::ZERO, Money::from_units(250));
        assert!(r.paid);
        assert_eq!(f.funds, Money::from_units(9_750));
        assert_eq!(f.consecutive_unpaid_rent_days, 0);

        let mut f = FinancialState::new(Money::from_units(100));
        let r = f.settle_day(Money::ZERO, Money::ZERO, Money::from_units(250));
        assert!(!r.paid);
        assert_eq!((f.funds, r.consecutive_unpaid), (Money::from_units(100), 1));
    }

    #[test]
    fn termination_after_five_unpaid() {
        let mut f = FinancialState::new(Money::ZERO);
        for _ in 0..4 {
            f.settle_day(Money::ZERO, Money::ZERO, Money::from_units(1));
        }
        assert!(!f.check_termination());
        f.settle_day(Money::ZERO, Money::ZERO, Money::from_units(1));
        assert_eq!(f.consecutive_unpaid_rent_days, 5);
        assert!(f.check_termination());
        f.settle_day(Money::from_units(5), Money::ZERO, Money::from_units(1));
        assert_eq!(f.consecutive_unpaid_rent_days, 0);
        assert!(!f.check_termination());
    }

    #[test]
    fn procurement_debit() {
        let mut f = FinancialState::new(Money::from_units(150));
        f.debit_procurement(Money::ZERO).unwrap();
        assert_eq!(f.funds, Money::from_units(150));
        assert!(matches!(
            f.debit_procurement(Money::from_units(200)),
            Err(Error::Funds { .. })
        ));
        assert_eq!(f.funds, Money::from_units(150));
        let mut f = FinancialState::new(Money::from_units(200));
        f.debit_procurement(Money::from_units(200)).unwrap();
        assert_eq!(f.funds, Money::ZERO);
    }

    #[test]
    fn linear_depreciation() {
        let c = Money::from_units(10);
        assert_eq!(unit_value(c, 10, 0), 10.0);
        assert_eq!(unit_value(c, 10, 10), 0.0);
        assert_eq!(unit_value(c, 10, 5), 5.0);
        assert_eq!(unit_value(c, 10, 15), 0.0);
    }
}
