use std::fmt;

/// One failed instance of a checked property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub lemma: &'static str,
    pub p: String,
    pub phi: String,
    pub generic: Option<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VIOLATION {} p={} phi={}", self.lemma, self.p, self.phi)?;
        if let Some(g) = &self.generic {
            write!(f, " G={g}")?;
        }
        Ok(())
    }
}

/// A list of violations, printed one per line.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    violations: Vec<Violation>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn extend(&mut self, other: Report) {
        self.violations.extend(other.violations);
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// 0 when clean, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.is_clean())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}
