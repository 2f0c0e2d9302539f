use std::fmt;
use std::str::FromStr;

/// Inclusive integer range written `a..b` or `a..b:step`; a bare `a` means `a..a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NRange {
    pub start: u32,
    pub end: u32,
    pub step: u32,
}

impl NRange {
    pub fn values(&self) -> Vec<u32> {
        (self.start..=self.end)
            .step_by(self.step as usize)
            .collect()
    }
}

impl fmt::Display for NRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}:{}", self.start, self.end, self.step)
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (bounds, step) = match s.split_once(':') {
            Some((b, st)) => (
                b,
                st.trim()
                    .parse::<u32>()
                    .map_err(|e| format!("bad step '{st}': {e}"))?,
            ),
            None => (s, 1),
        };
        if step == 0 {
            return Err("step must be positive".into());
        }
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| format!("bad bound '{t}': {e}"))
        };
        let (start, end) = match bounds.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(bounds)?;
                (v, v)
            }
        };
        if start > end {
            return Err(format!("range {start}..{end} is empty"));
        }
        Ok(NRange { start, end, step })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!("4..4".parse::<NRange>().unwrap().values(), vec![4]);
        assert_eq!(
            "2..10:4".parse::<NRange>().unwrap().values(),
            vec![2, 6, 10]
        );
        assert_eq!("7".parse::<NRange>().unwrap().values(), vec![7]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!("5..4".parse::<NRange>().is_err());
        assert!("1..4:0".parse::<NRange>().is_err());
        assert!("a..4".parse::<NRange>().is_err());
    }
}
