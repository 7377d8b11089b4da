//! Exact subgroup arithmetic for free groups and `Z^d`, and the truncated
//! Chabauty topology on their spaces of subgroups.

pub mod budget;
pub mod chabauty;
pub mod dynamics;
pub mod error;
pub mod hom;
pub mod io;
pub mod schreier;
pub mod stallings;
pub mod subgroup;
pub mod words;
pub mod zd;

pub use budget::Budget;
pub use chabauty::{ClopenSet, Convergence, Distance, SubgroupTrace};
pub use error::{Error, Result};
pub use hom::HomSubgroup;
pub use io::{FreeSub, SubgroupSpec};
pub use stallings::StallingsGraph;
pub use subgroup::{CosetKey, FreeGroup, FreeSubgroup, GradedFreeGroup, Index, Space, Subgroup};
pub use words::{GroupContext, GroupKind, Letter, Word};
pub use zd::{HnfSubgroup, Lattice};
