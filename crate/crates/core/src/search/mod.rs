//! Structure searches: score-based BOSS and constraint-based PC-Max.

mod boss;
mod pcmax;
mod subsets;

pub use boss::{best_parents_given_prefix, boss_search, BossOptions, BossResult};
pub use pcmax::{
    orient_colliders_maxp, pcmax_search, pcmax_skeleton, PcMaxOptions, PcMaxResult, SepSetMap,
};
