//! Grid arguments: integer ranges `a..b` (inclusive) and comma lists of reals.

#[derive(Debug, Clone, PartialEq)]
pub struct Ints(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq)]
pub struct Reals(pub Vec<f64>);

pub fn ints(s: &str) -> Result<Ints, String> {
    parse_ints(s).map(Ints)
}

pub fn reals(s: &str) -> Result<Reals, String> {
    parse_reals(s).map(Reals)
}

pub fn parse_ints(s: &str) -> Result<Vec<usize>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
        let b: usize = b.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
        if a > b {
            return Err(format!("empty range {s:?}"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("bad integer {t:?}")))
        .collect()
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}")))
        .collect::<Result<_, _>>()?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(format!("non-finite entry in {s:?}"));
    }
    Ok(v)
}
