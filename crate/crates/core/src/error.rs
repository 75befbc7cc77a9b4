use crate::config::ConfigError;
use crate::data::DataError;
use crate::eval::EvalError;
use crate::expert::ExpertError;
use crate::nn::NnError;
use crate::offrl::OffrlError;
use crate::sim::SimError;
use crate::worldgen::GenError;

/// Coarse failure class; the command-line tool maps each to an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numeric,
    Io,
    Protocol,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Expert(#[from] ExpertError),
    #[error(transparent)]
    Offrl(#[from] OffrlError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

fn sim_kind(e: &SimError) -> ErrorKind {
    match e {
        SimError::NonFinite(_) => ErrorKind::Numeric,
        SimError::Io(_) => ErrorKind::Io,
        SimError::Parse { .. } => ErrorKind::Data,
        SimError::InvalidPose(_) | SimError::Protocol(_) => ErrorKind::Protocol,
        SimError::InvalidWorld(_) | SimError::InvalidConfig(_) => ErrorKind::Config,
    }
}

fn data_kind(e: &DataError) -> ErrorKind {
    match e {
        DataError::Config(_) => ErrorKind::Config,
        DataError::Io(_) => ErrorKind::Io,
        _ => ErrorKind::Data,
    }
}

fn nn_kind(e: &NnError) -> ErrorKind {
    match e {
        NnError::NonFinite { .. } | NnError::NonFiniteGradient { .. } => ErrorKind::Numeric,
        NnError::Config(_) => ErrorKind::Config,
        NnError::Io(_) => ErrorKind::Io,
        NnError::Shape { .. } | NnError::Format { .. } => ErrorKind::Data,
    }
}

fn offrl_kind(e: &OffrlError) -> ErrorKind {
    match e {
        OffrlError::Config(_) => ErrorKind::Config,
        OffrlError::ContractViolation(_) => ErrorKind::Protocol,
        OffrlError::NonFinite { .. } | OffrlError::NonFiniteLayer { .. } => ErrorKind::Numeric,
        OffrlError::Nn(e) => nn_kind(e),
        OffrlError::Data(e) => data_kind(e),
    }
}

fn expert_kind(e: &ExpertError) -> ErrorKind {
    match e {
        ExpertError::NoPath { .. } | ExpertError::Blocked(_) | ExpertError::Config(_) => ErrorKind::Config,
        ExpertError::Protocol(_) => ErrorKind::Protocol,
        ExpertError::Sim(e) => sim_kind(e),
        ExpertError::Data(e) => data_kind(e),
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(ConfigError::Io(_)) | Error::Io(_) => ErrorKind::Io,
            Error::Config(_) | Error::Gen(GenError::Config(_) | GenError::Disconnected { .. }) => ErrorKind::Config,
            Error::Gen(GenError::Sim(e)) | Error::Sim(e) => sim_kind(e),
            Error::Data(e) => data_kind(e),
            Error::Nn(e) => nn_kind(e),
            Error::Expert(e) => expert_kind(e),
            Error::Offrl(e) => offrl_kind(e),
            Error::Eval(e) => match e {
                EvalError::Config(_) => ErrorKind::Config,
                EvalError::Protocol(_) => ErrorKind::Protocol,
                EvalError::Shape { .. } | EvalError::Parse { .. } => ErrorKind::Data,
                EvalError::Io(_) => ErrorKind::Io,
                EvalError::Sim(e) => sim_kind(e),
                EvalError::Expert(e) => expert_kind(e),
                EvalError::Nn(e) => nn_kind(e),
                EvalError::Offrl(e) => offrl_kind(e),
            },
        }
    }
}
