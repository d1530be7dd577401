//! Boundary resolution as a chart-rewriting system.
//!
//! A chart is the abstract shape of a local equation
//! `z_1 ... z_r = u · w_1^{m_1} ... w_s^{m_s}` inside affine (d+1)-space,
//! with `l` further boundary coordinates `v_c` not entering the equation.
//! Blowing up the center {z_a = w_b = 0} produces two charts per the exponent
//! bookkeeping of the two standard affine pieces; the worklist repeats until
//! every chart is one of the terminal shapes.
//!
//! Termination certificate: the lexicographic measure (r, Σ m_j, max m_j)
//! strictly decreases in both children of every blow-up.

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ResolverError {
    #[error("invalid blow-up center ({0}, {1})")]
    InvalidCenter(usize, usize),
    #[error("chart is terminal; no blow-up applies")]
    TerminalChart,
    #[error("step limit {0} exceeded (this signals a bug, not expected behavior)")]
    StepLimitExceeded(usize),
    #[error("invalid scheme: {0}")]
    InvalidInput(String),
}

/// Local-equation shape: r z-variables, w-exponent multiset m (sorted
/// descending), l passive boundary variables.  The unit is tracked as a flag
/// only.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Chart {
    pub r: u32,
    pub m: Vec<u32>,
    pub l: u32,
    pub unit: bool,
}

impl Chart {
    pub fn new(r: u32, mut m: Vec<u32>, l: u32) -> Self {
        assert!(m.iter().all(|&x| x >= 1), "w-exponents must be >= 1");
        m.sort_unstable_by(|a, b| b.cmp(a));
        Chart {
            r,
            m,
            l,
            unit: true,
        }
    }

    pub fn dimension(&self) -> u32 {
        self.r + self.m.len() as u32 + self.l
    }

    pub fn s(&self) -> usize {
        self.m.len()
    }

    /// Lexicographic termination measure (r, Σ m_j, max m_j).
    pub fn measure(&self) -> (u32, u32, u32) {
        (
            self.r,
            self.m.iter().sum(),
            self.m.first().copied().unwrap_or(0),
        )
    }
}

/// Terminal classification of Prop-style local descriptions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartClass {
    /// r, s >= 2 and all m_j = 1 (still needs blow-ups).
    A,
    /// s = 1 with m_1 = 1, r >= 1.
    B,
    /// r = 1 with arbitrary w-exponents.
    C,
    /// s = 0: the equation is a unit.
    D,
    /// anything else (mixed exponents with r >= 2).
    NonStandard,
}

impl ChartClass {
    pub fn is_terminal(self) -> bool {
        matches!(self, ChartClass::B | ChartClass::C | ChartClass::D)
    }
}

pub fn classify(chart: &Chart) -> ChartClass {
    let s = chart.s() as u32;
    if s == 0 {
        return ChartClass::D;
    }
    if chart.r == 1 {
        return ChartClass::C;
    }
    if s == 1 && chart.m[0] == 1 {
        return ChartClass::B;
    }
    if chart.r >= 2 && s >= 2 && chart.m.iter().all(|&x| x == 1) {
        return ChartClass::A;
    }
    ChartClass::NonStandard
}

/// Initial boundary chart shapes of the scheme with exponents `n`:
/// one chart per splitting of the coordinate set into a nonempty root set R
/// and a disjoint nonempty pole set P, with shape (|R|, {n_j : j ∈ P}) padded
/// by passive variables to dimension d+1.
pub fn initial_charts(n: &[u32]) -> Result<Vec<Chart>, ResolverError> {
    if n.is_empty() || n.iter().any(|&x| x == 0) {
        return Err(ResolverError::InvalidInput(
            "need d+1 exponents >= 1".into(),
        ));
    }
    let dim = n.len() as u32; // d + 1
    let count = n.len();
    let mut charts = Vec::new();
    // iterate over assignments of each coordinate to {root, pole, free}
    let mut assign = vec![0u8; count];
    loop {
        let r = assign.iter().filter(|&&a| a == 1).count() as u32;
        let poles: Vec<u32> = assign
            .iter()
            .zip(n)
            .filter(|(&a, _)| a == 2)
            .map(|(_, &nk)| nk)
            .collect();
        if r >= 1 && !poles.is_empty() {
            let l = dim - r - poles.len() as u32;
            charts.push(Chart::new(r, poles, l));
        }
        // advance ternary counter
        let mut idx = 0;
        loop {
            if idx == count {
                charts.sort();
                charts.dedup();
                return Ok(charts);
            }
            assign[idx] += 1;
            if assign[idx] < 3 {
                break;
            }
            assign[idx] = 0;
            idx += 1;
        }
    }
}

/// Blow up a chart at the center (z_a, w_b); `a`, `b` are 1-based.  Returns
/// the two affine pieces (U1, U2) of the blow-up.
pub fn blow_up(chart: &Chart, a: usize, b: usize) -> Result<(Chart, Chart), ResolverError> {
    if classify(chart).is_terminal() {
        return Err(ResolverError::TerminalChart);
    }
    if a == 0 || a as u32 > chart.r || b == 0 || b > chart.s() {
        return Err(ResolverError::InvalidCenter(a, b));
    }
    let mb = chart.m[b - 1];
    // U1: z_a divides out; the old z_a re-enters with exponent m_b - 1 and the
    // exceptional w/z keeps exponent m_b.
    let u1 = {
        let mut m = chart.m.clone();
        m.remove(b - 1);
        m.push(mb); // w_b / z_a
        let mut l = chart.l;
        if mb > 1 {
            m.push(mb - 1); // old z_a as a new w-variable
        } else {
            l += 1; // exponent zero: z_a becomes a passive boundary variable
        }
        Chart::new(chart.r - 1, m, l)
    };
    // U2: w_b's exponent drops by one (to a passive variable when it hits 0).
    let u2 = {
        let mut m = chart.m.clone();
        let mut l = chart.l;
        if mb > 1 {
            m[b - 1] = mb - 1;
        } else {
            m.remove(b - 1);
            l += 1;
        }
        Chart::new(chart.r, m, l)
    };
    Ok((u1, u2))
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub chart_before: Chart,
    /// 1-based (z, w) center; w index in the sorted-descending order.
    pub center: (usize, usize),
    pub charts_after: (Chart, Chart),
    pub measure_before: (u32, u32, u32),
    pub measures_after: ((u32, u32, u32), (u32, u32, u32)),
}

#[derive(Debug, Serialize)]
pub struct ResolutionTrace {
    pub n: Vec<u32>,
    pub steps: Vec<StepRecord>,
    pub terminal: Vec<Chart>,
    /// true when the measure strictly decreased into every produced chart
    pub measure_strictly_decreasing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorklistOrder {
    Fifo,
    Lifo,
}

/// Run the rewriting worklist: repeatedly blow up any non-terminal chart at
/// the center with maximal m_b (lowest index among ties; z-index 1).
pub fn resolve_with(
    n: &[u32],
    order: WorklistOrder,
    step_limit: usize,
) -> Result<ResolutionTrace, ResolverError> {
    let mut work = std::collections::VecDeque::from(initial_charts(n)?);
    let mut terminal = Vec::new();
    let mut steps = Vec::new();
    let mut monotone = true;
    let mut counter = 0usize;
    while let Some(chart) = match order {
        WorklistOrder::Fifo => work.pop_front(),
        WorklistOrder::Lifo => work.pop_back(),
    } {
        if classify(&chart).is_terminal() {
            terminal.push(chart);
            continue;
        }
        counter += 1;
        if counter > step_limit {
            return Err(ResolverError::StepLimitExceeded(step_limit));
        }
        // maximal exponent sits first in the sorted multiset
        let center = (1usize, 1usize);
        let (u1, u2) = blow_up(&chart, center.0, center.1)?;
        let before = chart.measure();
        let after = (u1.measure(), u2.measure());
        if after.0 >= before || after.1 >= before {
            monotone = false;
        }
        steps.push(StepRecord {
            step: counter,
            chart_before: chart,
            center,
            charts_after: (u1.clone(), u2.clone()),
            measure_before: before,
            measures_after: after,
        });
        work.push_back(u1);
        work.push_back(u2);
    }
    terminal.sort();
    Ok(ResolutionTrace {
        n: n.to_vec(),
        steps,
        terminal,
        measure_strictly_decreasing: monotone,
    })
}

pub fn resolve(n: &[u32]) -> Result<ResolutionTrace, ResolverError> {
    resolve_with(n, WorklistOrder::Fifo, 1_000_000)
}

impl ResolutionTrace {
    /// One JSON record per rewriting step.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("trace serializes"));
            out.push('\n');
        }
        out
    }

    pub fn all_terminal_standard(&self) -> bool {
        self.terminal
            .iter()
            .all(|c| classify(c).is_terminal())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_charts_d1() {
        let charts = initial_charts(&[2, 2]).unwrap();
        // r=1, m={2}, l=0 must appear
        assert!(charts.contains(&Chart::new(1, vec![2], 0)));
        for c in &charts {
            assert_eq!(c.dimension(), 2);
        }
    }

    #[test]
    fn initial_charts_d2() {
        let charts = initial_charts(&[2, 2, 2]).unwrap();
        assert!(charts.contains(&Chart::new(2, vec![2], 0)));
        assert!(charts.contains(&Chart::new(1, vec![2, 2], 0)));
        for c in &charts {
            assert_eq!(c.dimension(), 3);
        }
    }

    #[test]
    fn blow_up_hand_traces() {
        // (r=2, m={1,1}) at (1,1): U1 terminal r=1; U2 = (r=2, m={1}, l+1) case (b)
        let c = Chart::new(2, vec![1, 1], 0);
        let (u1, u2) = blow_up(&c, 1, 1).unwrap();
        assert_eq!(u1, Chart::new(1, vec![1, 1], 1));
        assert_eq!(classify(&u1), ChartClass::C);
        assert_eq!(u2, Chart::new(2, vec![1], 1));
        assert_eq!(classify(&u2), ChartClass::B);
        // (r=2, m={2}) at (1,1): U1 = case (c); U2 = (r=2, m={1}) case (b)
        let c = Chart::new(2, vec![2], 0);
        let (u1, u2) = blow_up(&c, 1, 1).unwrap();
        assert_eq!(u1, Chart::new(1, vec![2, 1], 0));
        assert_eq!(classify(&u1), ChartClass::C);
        assert_eq!(u2, Chart::new(2, vec![1], 0));
        assert_eq!(classify(&u2), ChartClass::B);
        // dimension preserved
        assert_eq!(u1.dimension(), 3);
        assert_eq!(u2.dimension(), 3);
    }

    #[test]
    fn classification_table() {
        assert_eq!(classify(&Chart::new(1, vec![3, 2], 0)), ChartClass::C);
        assert_eq!(classify(&Chart::new(3, vec![], 0)), ChartClass::D);
        assert_eq!(classify(&Chart::new(2, vec![1], 0)), ChartClass::B);
        assert_eq!(classify(&Chart::new(2, vec![1, 1], 0)), ChartClass::A);
        assert_eq!(
            classify(&Chart::new(2, vec![2, 1], 0)),
            ChartClass::NonStandard
        );
    }

    #[test]
    fn resolve_terminates_and_classifies() {
        for n in [vec![2u32, 2], vec![2, 2, 2], vec![2, 3, 4], vec![3, 3, 3, 3]] {
            let trace = resolve(&n).unwrap();
            assert!(trace.all_terminal_standard(), "n = {n:?}");
            assert!(trace.measure_strictly_decreasing, "n = {n:?}");
            for s in &trace.steps {
                assert!(s.charts_after.0.dimension() == s.chart_before.dimension());
                assert!(s.charts_after.1.dimension() == s.chart_before.dimension());
            }
        }
    }

    #[test]
    fn resolve_with_unit_exponent() {
        let trace = resolve(&[1, 2, 2]).unwrap();
        assert!(trace.all_terminal_standard());
        assert!(trace.measure_strictly_decreasing);
        // unit exponents change the chart shapes
        let full = initial_charts(&[2, 2, 2]).unwrap();
        let here = initial_charts(&[1, 2, 2]).unwrap();
        assert_ne!(full, here);
    }

    #[test]
    fn worklist_order_invariance() {
        for n in [vec![2u32, 2, 2], vec![2, 3, 4]] {
            let a = resolve_with(&n, WorklistOrder::Fifo, 1_000_000).unwrap();
            let b = resolve_with(&n, WorklistOrder::Lifo, 1_000_000).unwrap();
            assert_eq!(a.terminal, b.terminal, "n = {n:?}");
        }
    }

    #[test]
    fn trace_is_json_lines() {
        let trace = resolve(&[2, 2]).unwrap();
        for line in trace.to_json_lines().lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v.get("chart_before").is_some());
            assert!(v.get("measure_before").is_some());
        }
    }
}
