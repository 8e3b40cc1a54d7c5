//! `.mds` documents, their serializations and JSON reports.

mod document;
mod format;

pub use document::{
    build, build_factorization, build_fan, build_unchecked, parse_document, Document, FanDocument,
    PolyLine, Pos, RayDecl, RootDecl, StackDocument, VarDecl,
};
pub use format::{
    factorization_to_json, factorization_to_text, fan_to_json, fan_to_text, stack_to_json,
    stack_to_text, Report, SCHEMA,
};
