//! Core domain types: concepts, expressions, values, composed apps, and deviation reports.

mod app;
mod concept;
mod eval;
mod expr;
mod report;
mod validate;
mod value;

pub use app::{App, AppModel, ArgPattern, ConceptLibrary, InstanceDecl, LinkError, Reaction, SyncRule, SyncTrigger};
pub use concept::{
    ActionDef, ComponentKind, ConceptDef, ConceptState, Initiator, Param, Role, Sort, StateComponent,
    UpdateStmt,
};
pub use eval::{eval, eval_bool, eval_expr, Bindings, ConceptView, EvalError, StateSource};
pub use expr::{BinOp, Expr, Literal, StatePath};
pub use report::{normalize, Beneficiary, Category, DarkFinding, Deviation, Dyad, Principle};
pub use validate::{validate_concept, StaticError, StaticErrorKind};
pub use value::{Value, ValueLit};
