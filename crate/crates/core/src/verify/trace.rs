use std::fmt;

use crate::linalg::ComplexMatrix;

#[derive(Clone, Debug, PartialEq)]
pub enum TraceValue {
    Matrix(ComplexMatrix),
    Scalar(f64),
    Count(usize),
}

/// Named intermediate values of a trial. Recording is a no-op when the
/// trace is disabled.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    enabled: bool,
    entries: Vec<(String, TraceValue)>,
}

impl Trace {
    pub fn enabled() -> Self {
        Self {
            enabled: true,
            entries: Vec::new(),
        }
    }

    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn entries(&self) -> &[(String, TraceValue)] {
        &self.entries
    }

    pub fn matrix(&mut self, label: impl Into<String>, value: &ComplexMatrix) {
        if self.enabled {
            self.entries.push((label.into(), TraceValue::Matrix(value.clone())));
        }
    }

    pub fn scalar(&mut self, label: impl Into<String>, value: f64) {
        if self.enabled {
            self.entries.push((label.into(), TraceValue::Scalar(value)));
        }
    }

    pub fn count(&mut self, label: impl Into<String>, value: usize) {
        if self.enabled {
            self.entries.push((label.into(), TraceValue::Count(value)));
        }
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, value) in &self.entries {
            match value {
                TraceValue::Matrix(m) => writeln!(f, "{label} ({}x{}) = {m}", m.rows(), m.cols())?,
                TraceValue::Scalar(x) => writeln!(f, "{label} = {x:e}")?,
                TraceValue::Count(c) => writeln!(f, "{label} = {c}")?,
            }
        }
        Ok(())
    }
}
