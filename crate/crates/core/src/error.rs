use thiserror::Error;

use crate::farey::Slope;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid slope: {0}")]
    InvalidSlope(String),
    #[error("invalid mapping class: {0}")]
    InvalidMappingClass(String),
    #[error("invalid marking: {0}")]
    InvalidMarking(String),
    #[error("projection of {curve} to the annulus about {core} is undefined")]
    UndefinedProjection { curve: Slope, core: Slope },
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("domain is not nested in the geodesic's domain: {0}")]
    NotNested(String),
    #[error("invalid slice: {0}")]
    InvalidSlice(String),
    #[error("index out of range: {0}")]
    InvalidIndex(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("arithmetic overflow")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
